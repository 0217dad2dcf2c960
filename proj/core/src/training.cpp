#include "blockout/training.hpp"

#include <cmath>

namespace blockout {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::dense: return "dense";
        case Variant::soft_learned: return "soft-learned";
        case Variant::hard_fixed: return "hard-fixed";
        case Variant::hard_learned: return "hard-learned";
    }
    return "unknown";
}

Variant variant_from_name(const std::string& name) {
    if (name == "dense") return Variant::dense;
    if (name == "soft-learned") return Variant::soft_learned;
    if (name == "hard-fixed") return Variant::hard_fixed;
    if (name == "hard-learned") return Variant::hard_learned;
    throw DomainError("unknown variant \"" + name +
                      "\" (expected dense, soft-learned, hard-fixed or hard-learned)");
}

void TrainConfig::validate(std::size_t dataset_size) const {
    if (learning_rate < 0.0) throw DomainError("TrainConfig: negative learning rate");
    if (lr_decay_factor <= 0.0) throw DomainError("TrainConfig: decay factor must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw DomainError("TrainConfig: momentum must lie in [0,1)");
    if (batch_size == 0) throw DomainError("TrainConfig: batch size must be positive");
    if (batch_size > dataset_size)
        throw DomainError("TrainConfig: batch size " + std::to_string(batch_size) +
                          " exceeds dataset size " + std::to_string(dataset_size));
    if (theta_lr_multiplier < 0.0)
        throw DomainError("TrainConfig: negative theta learning-rate multiplier");
}

double learning_rate_at(const TrainConfig& config, std::uint64_t iteration) {
    if (config.lr_decay_interval == 0) return config.learning_rate;
    double rate = config.learning_rate;
    for (std::uint64_t steps = iteration / config.lr_decay_interval; steps > 0; --steps)
        rate *= config.lr_decay_factor;
    return rate;
}

namespace {

double batch_accuracy(const DenseMatrix& logits, const std::vector<std::uint16_t>& labels) {
    const std::vector<std::size_t> predicted = argmax_cols(logits);
    std::size_t correct = 0;
    for (std::size_t j = 0; j < labels.size(); ++j)
        if (predicted[j] == labels[j]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

[[noreturn]] void diagnose_divergence(Network& net, const BatchIterator::Batch& batch,
                                      std::uint64_t iteration, const DenseMatrix& loss_grad) {
    // Re-run the forward with the assignments already in place to find the
    // first layer whose activations went non-finite.
    std::string culprit = "softmax-loss";
    DenseMatrix a = batch.features;
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        a = net.layer(i).forward_train(a, nullptr, iteration, SamplePolicy::reuse);
        if (!a.all_finite()) {
            culprit = net.layer_label(i);
            break;
        }
    }
    const double worst_grad = max_abs(loss_grad);
    throw TrainingDiverged(iteration, culprit, worst_grad,
                           "non-finite loss at iteration " + std::to_string(iteration) + ", " +
                               culprit + ", max |grad| = " + std::to_string(worst_grad));
}

}  // namespace

void train_iteration(Network& net, const BatchIterator::Batch& batch, const TrainConfig& config,
                     std::uint64_t iteration, RngStream& rng, TrainingLog& log) {
    const SamplePolicy policy =
        config.variant == Variant::soft_learned ? SamplePolicy::soft : SamplePolicy::fresh;
    DenseMatrix logits = net.train_logits(batch.features, &rng, iteration, policy);
    SoftmaxResult loss = softmax_cross_entropy(logits, batch.labels);
    if (!std::isfinite(loss.loss)) diagnose_divergence(net, batch, iteration, loss.grad);

    const double accuracy = batch_accuracy(logits, batch.labels);
    net.clear_cluster_gradients();
    net.backward(loss.grad);
    const bool update_theta =
        config.variant == Variant::hard_learned || config.variant == Variant::soft_learned;
    const bool mask_unselected = config.variant != Variant::soft_learned;
    net.apply_updates(learning_rate_at(config, iteration), config.momentum,
                      config.theta_lr_multiplier, update_theta, mask_unselected);
    log.iterations.push_back({iteration, loss.loss, accuracy});
}

namespace {

void snapshot_probabilities(const Network& net, std::uint64_t completed, TrainingLog& log) {
    for (std::size_t i = 0; i < net.interfaces().size(); ++i)
        log.snapshots.push_back(
            {completed, static_cast<std::uint32_t>(i), net.interfaces()[i]->probabilities()});
}

}  // namespace

void run_training(Network& net, const Dataset& train, const Dataset* eval,
                  const TrainConfig& config, TrainingLog& log) {
    config.validate(train.size());
    net.set_mode(Mode::train);
    RngStream root(config.seed);
    RngStream sample_rng = root.derive(11);
    BatchIterator batches(train, config.batch_size, root.derive(12));

    snapshot_probabilities(net, 0, log);
    for (std::uint64_t t = 0; t < config.iterations; ++t) {
        const BatchIterator::Batch batch = batches.next();
        train_iteration(net, batch, config, t, sample_rng, log);
        const std::uint64_t completed = t + 1;
        const bool due = config.snapshot_interval != 0 && completed % config.snapshot_interval == 0;
        if (due || completed == config.iterations) {
            snapshot_probabilities(net, completed, log);
            if (eval != nullptr) log.evals.push_back({t, evaluate(net, *eval)});
        }
    }
}

double evaluate(Network& net, const Dataset& dataset) {
    if (dataset.size() == 0) throw DomainError("evaluate: empty dataset");
    const Mode previous = net.mode();
    net.set_mode(Mode::infer);
    const std::size_t chunk = 256;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < dataset.size(); begin += chunk) {
        const std::size_t count = std::min(chunk, dataset.size() - begin);
        DenseMatrix x(dataset.dim(), count);
        for (std::size_t j = 0; j < count; ++j)
            for (std::size_t d = 0; d < dataset.dim(); ++d)
                x(d, j) = dataset.features(begin + j, d);
        const std::vector<std::size_t> predicted = argmax_cols(net.infer_logits(x));
        for (std::size_t j = 0; j < count; ++j)
            if (predicted[j] == dataset.labels[begin + j]) ++correct;
    }
    net.set_mode(previous);
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace blockout
