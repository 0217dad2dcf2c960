#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockout/dataset.hpp"
#include "blockout/network.hpp"

namespace blockout {

// The three training modes of a Blockout network plus the plain-dense
// baseline of identical widths:
//   dense        - no Blockout layers at all
//   soft_learned - no sampling, C := P during training and inference
//   hard_fixed   - sample C, probabilities stay frozen at 0.5
//   hard_learned - sample C and learn the probabilities (the full method)
enum class Variant { dense, soft_learned, hard_fixed, hard_learned };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct TrainConfig {
    double learning_rate = 0.1;
    double lr_decay_factor = 0.5;
    std::uint64_t lr_decay_interval = 0;  // iterations between decays; 0 disables
    double momentum = 0.9;
    std::size_t batch_size = 32;
    std::uint64_t iterations = 1000;
    std::uint64_t seed = 1;
    double theta_lr_multiplier = 1.0;
    std::uint64_t snapshot_interval = 100;  // P snapshots + eval cadence; 0 disables
    Variant variant = Variant::hard_learned;

    void validate(std::size_t dataset_size) const;
};

double learning_rate_at(const TrainConfig& config, std::uint64_t iteration);

struct IterationStat {
    std::uint64_t iteration;  // 0-based
    double loss;
    double accuracy;  // on the training batch
};

struct EvalPoint {
    std::uint64_t iteration;  // the iteration after which the split was scored
    double accuracy;
};

struct ProbabilitySnapshot {
    std::uint64_t iteration;  // completed-iteration count: 0 = initialization
    std::uint32_t interface_id;
    DenseMatrix p;
};

struct TrainingLog {
    std::vector<IterationStat> iterations;
    std::vector<EvalPoint> evals;
    std::vector<ProbabilitySnapshot> snapshots;
};

// One step of the training loop: resolve assignments (fresh draw or soft,
// per variant), forward, softmax cross-entropy, backward with the shared
// assignment gradients summed across adjacent layers, then the momentum
// updates. A non-finite loss aborts with TrainingDiverged naming the
// iteration, the first layer with non-finite activations, and max |grad|.
void train_iteration(Network& net, const BatchIterator::Batch& batch, const TrainConfig& config,
                     std::uint64_t iteration, RngStream& rng, TrainingLog& log);

// Full loop: mini-batches from `train`, P snapshots at the configured cadence
// (including iteration 0 and the final state), and periodic accuracy on
// `eval` when given. The sampling and shuffling streams derive from
// config.seed, so a config reproduces its log exactly.
void run_training(Network& net, const Dataset& train, const Dataset* eval,
                  const TrainConfig& config, TrainingLog& log);

// Fraction of argmax-correct predictions under deterministic inference
// weights. Switches the network to infer mode for the pass and restores the
// previous mode.
double evaluate(Network& net, const Dataset& dataset);

}  // namespace blockout
