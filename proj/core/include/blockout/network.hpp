#pragma once

#include <memory>
#include <vector>

#include "blockout/blockout_layer.hpp"
#include "blockout/layers.hpp"

namespace blockout {

enum class Mode { train, infer };

// An ordered stack of layers ending in exactly one SoftmaxLossLayer.
// Consecutive Blockout layers (activation layers in between do not break
// adjacency) automatically share the cluster interface of the nodes between
// them. The network keeps a registry of the distinct interfaces, in layer
// order, for gradient bookkeeping, snapshots and the theta updates.
class Network {
public:
    Network() = default;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    void add_dense(std::size_t input_dim, std::size_t output_dim, RngStream& rng);
    void add_relu();
    void add_blockout(std::size_t input_dim, std::size_t output_dim, std::size_t clusters,
                      RngStream& rng);
    void add_softmax_loss(std::size_t classes);

    // Validates dimension chaining and the single-terminal-loss invariant.
    // Must be called once after the last add_*; forward passes refuse to run
    // on an unfinalized network.
    void finalize();
    bool finalized() const { return finalized_; }

    Mode mode() const { return mode_; }
    void set_mode(Mode m) { mode_ = m; }

    std::size_t input_dim() const;
    std::size_t num_classes() const;

    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }
    std::string layer_label(std::size_t i) const;

    const std::vector<std::shared_ptr<ClusterInterface>>& interfaces() const {
        return interfaces_;
    }

    // Forward to logits in train mode (the terminal loss layer passes them
    // through). Refuses to run in infer mode: inference never samples and
    // never caches.
    DenseMatrix train_logits(const DenseMatrix& x, RngStream* rng, std::uint64_t iteration,
                             SamplePolicy policy);

    // Deterministic inference forward to logits.
    DenseMatrix infer_logits(const DenseMatrix& x) const;

    // Backward through every layer; assignment gradients accumulate into the
    // shared interfaces. Returns the gradient with respect to the input.
    DenseMatrix backward(const DenseMatrix& loss_grad);

    void clear_cluster_gradients();

    // Momentum step on every layer parameter; when update_theta is set the
    // cluster logits move too (at learning_rate * theta_lr_multiplier), with
    // mask_unselected choosing the hard-sampling gradient rule.
    void apply_updates(double learning_rate, double momentum, double theta_lr_multiplier,
                       bool update_theta, bool mask_unselected);

private:
    void require_unfinalized() const;

    std::vector<std::unique_ptr<Layer>> layers_;
    std::vector<std::shared_ptr<ClusterInterface>> interfaces_;
    Mode mode_ = Mode::train;
    bool finalized_ = false;
};

}  // namespace blockout
