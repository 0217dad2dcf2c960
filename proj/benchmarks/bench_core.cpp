#include <benchmark/benchmark.h>

#include "blockout/blockout_layer.hpp"
#include "blockout/dataset.hpp"
#include "blockout/training.hpp"

using namespace blockout;

static void BM_Matmul(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    RngStream rng(1);
    const DenseMatrix a = gaussian_matrix(n, n, 1.0, rng);
    const DenseMatrix b = gaussian_matrix(n, n, 1.0, rng);
    for (auto _ : state) {
        DenseMatrix c = matmul(a, b);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_BuildMask(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    RngStream rng(2);
    DenseMatrix c_out(d, 4);
    DenseMatrix c_in(d, 4);
    for (double& v : c_out.values()) v = rng.next_uniform() < 0.5 ? 1.0 : 0.0;
    for (double& v : c_in.values()) v = rng.next_uniform() < 0.5 ? 1.0 : 0.0;
    for (auto _ : state) {
        DenseMatrix mask = build_mask(c_out, c_in, 4);
        benchmark::DoNotOptimize(mask.data());
    }
}
BENCHMARK(BM_BuildMask)->RangeMultiplier(2)->Range(32, 512);

static void BM_ForwardTrain(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    RngStream rng(3);
    BlockoutLayer layer(d, d, 4, rng);
    const DenseMatrix x = gaussian_matrix(d, 32, 1.0, rng);
    RngStream sample_rng(4);
    std::uint64_t iteration = 0;
    for (auto _ : state) {
        DenseMatrix y = layer.forward_train(x, &sample_rng, iteration++, SamplePolicy::fresh);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_ForwardTrain)->RangeMultiplier(2)->Range(32, 256);

static void BM_TrainIteration(benchmark::State& state) {
    const std::size_t h = static_cast<std::size_t>(state.range(0));
    HierarchicalSpec spec;
    spec.seed = 5;
    spec.superclasses = 4;
    spec.subclasses_per = 5;
    spec.dim = 32;
    spec.per_class = 20;
    const Dataset ds = generate_hierarchical(spec);

    RngStream rng(6);
    Network net;
    net.add_dense(ds.dim(), h, rng);
    net.add_relu();
    net.add_blockout(h, h, 4, rng);
    net.add_relu();
    net.add_blockout(h, ds.num_classes, 4, rng);
    net.add_softmax_loss(ds.num_classes);
    net.finalize();

    TrainConfig cfg;
    cfg.batch_size = 32;
    cfg.variant = Variant::hard_learned;
    BatchIterator batches(ds, cfg.batch_size, RngStream(7));
    RngStream sample_rng(8);
    TrainingLog log;
    std::uint64_t iteration = 0;
    for (auto _ : state) {
        const BatchIterator::Batch batch = batches.next();
        train_iteration(net, batch, cfg, iteration++, sample_rng, log);
        benchmark::DoNotOptimize(log.iterations.back().loss);
    }
}
BENCHMARK(BM_TrainIteration)->RangeMultiplier(2)->Range(32, 256);

BENCHMARK_MAIN();
