#include "blockout/network.hpp"

namespace blockout {

namespace {

const char* kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::dense: return "dense";
        case LayerKind::blockout: return "blockout";
        case LayerKind::relu: return "relu";
        case LayerKind::softmax_loss: return "softmax-loss";
    }
    return "unknown";
}

}  // namespace

void Network::require_unfinalized() const {
    if (finalized_) throw StateError("Network: cannot add layers after finalize()");
}

void Network::add_dense(std::size_t input_dim, std::size_t output_dim, RngStream& rng) {
    require_unfinalized();
    layers_.push_back(std::make_unique<DenseLayer>(input_dim, output_dim, rng));
}

void Network::add_relu() {
    require_unfinalized();
    if (layers_.empty()) throw StateError("Network: relu cannot be the first layer");
    layers_.push_back(std::make_unique<ReluLayer>(layers_.back()->output_dim()));
}

void Network::add_blockout(std::size_t input_dim, std::size_t output_dim, std::size_t clusters,
                           RngStream& rng) {
    require_unfinalized();
    auto layer = std::make_unique<BlockoutLayer>(input_dim, output_dim, clusters, rng);
    // Adjacency skips activation layers: the nodes between two consecutive
    // linear transforms keep one set of cluster parameters even with a
    // nonlinearity applied to them.
    for (std::size_t i = layers_.size(); i-- > 0;) {
        if (layers_[i]->kind() == LayerKind::relu) continue;
        if (layers_[i]->kind() == LayerKind::blockout) {
            auto& upstream = static_cast<BlockoutLayer&>(*layers_[i]);
            if (upstream.output_dim() != input_dim)
                throw ShapeError("add_blockout: upstream blockout output " +
                                 std::to_string(upstream.output_dim()) +
                                 " does not match input " + std::to_string(input_dim));
            if (upstream.clusters() != clusters)
                throw DomainError("add_blockout: adjacent blockout layers must share a cluster "
                                  "count, got " + std::to_string(upstream.clusters()) + " and " +
                                  std::to_string(clusters));
            layer->share_input_interface(upstream.output_interface());
        }
        break;
    }
    if (!layer->input_interface_shared()) interfaces_.push_back(layer->input_interface());
    interfaces_.push_back(layer->output_interface());
    layers_.push_back(std::move(layer));
}

void Network::add_softmax_loss(std::size_t classes) {
    require_unfinalized();
    layers_.push_back(std::make_unique<SoftmaxLossLayer>(classes));
}

void Network::finalize() {
    if (layers_.empty()) throw StateError("Network: no layers");
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        if (layers_[i]->kind() == LayerKind::softmax_loss)
            throw StateError("Network: softmax-loss must be the terminal layer, found at " +
                             std::to_string(i));
        if (layers_[i]->output_dim() != layers_[i + 1]->input_dim())
            throw ShapeError("Network: layer " + std::to_string(i) + " output " +
                             std::to_string(layers_[i]->output_dim()) +
                             " does not chain into layer " + std::to_string(i + 1) + " input " +
                             std::to_string(layers_[i + 1]->input_dim()));
    }
    if (layers_.back()->kind() != LayerKind::softmax_loss)
        throw StateError("Network: terminal layer must be softmax-loss");
    finalized_ = true;
}

std::size_t Network::input_dim() const {
    if (layers_.empty()) throw StateError("Network: no layers");
    return layers_.front()->input_dim();
}

std::size_t Network::num_classes() const {
    if (layers_.empty()) throw StateError("Network: no layers");
    return layers_.back()->output_dim();
}

std::string Network::layer_label(std::size_t i) const {
    return "layer " + std::to_string(i) + " (" + std::string(kind_name(layers_[i]->kind())) + " " +
           std::to_string(layers_[i]->input_dim()) + "->" +
           std::to_string(layers_[i]->output_dim()) + ")";
}

DenseMatrix Network::train_logits(const DenseMatrix& x, RngStream* rng, std::uint64_t iteration,
                                  SamplePolicy policy) {
    if (!finalized_) throw StateError("Network: forward on an unfinalized network");
    if (mode_ != Mode::train)
        throw StateError("Network: train_logits requires train mode");
    DenseMatrix a = x;
    for (auto& layer : layers_) a = layer->forward_train(a, rng, iteration, policy);
    return a;
}

DenseMatrix Network::infer_logits(const DenseMatrix& x) const {
    if (!finalized_) throw StateError("Network: forward on an unfinalized network");
    DenseMatrix a = x;
    for (const auto& layer : layers_) a = layer->forward_infer(a);
    return a;
}

DenseMatrix Network::backward(const DenseMatrix& loss_grad) {
    DenseMatrix delta = loss_grad;
    for (std::size_t i = layers_.size(); i-- > 0;) delta = layers_[i]->backward(delta);
    return delta;
}

void Network::clear_cluster_gradients() {
    for (auto& iface : interfaces_) iface->clear_gradient();
}

void Network::apply_updates(double learning_rate, double momentum, double theta_lr_multiplier,
                            bool update_theta, bool mask_unselected) {
    for (auto& layer : layers_) layer->apply_update(learning_rate, momentum);
    for (auto& iface : interfaces_) {
        if (update_theta)
            iface->apply_update(learning_rate * theta_lr_multiplier, momentum, mask_unselected);
        else
            iface->clear_gradient();
    }
}

}  // namespace blockout
