#include "blockout/blockout_layer.hpp"

#include <cmath>

namespace blockout {

namespace {

// Shared mask algebra without the binary-entry validation; forward paths feed
// real-valued probabilities through the same expression.
DenseMatrix mask_from(const DenseMatrix& c_out, const DenseMatrix& c_in, std::size_t clusters) {
    DenseMatrix mask = matmul_abt(c_out, c_in);
    const double k = static_cast<double>(clusters);
    for (double& v : mask.values()) v /= k;
    return mask;
}

}  // namespace

DenseMatrix build_mask(const DenseMatrix& c_out, const DenseMatrix& c_in, std::size_t clusters) {
    if (c_out.cols() != clusters || c_in.cols() != clusters)
        throw ShapeError("build_mask: expected " + std::to_string(clusters) +
                         " assignment columns, got " + c_out.shape_string() + " and " +
                         c_in.shape_string());
    for (const DenseMatrix* m : {&c_out, &c_in})
        for (double v : m->values())
            if (v != 0.0 && v != 1.0)
                throw DomainError("build_mask: assignment entry " + std::to_string(v) +
                                  " is not binary");
    return mask_from(c_out, c_in, clusters);
}

BlockoutLayer::BlockoutLayer(std::size_t input_dim, std::size_t output_dim, std::size_t clusters,
                             RngStream& rng)
    : clusters_(clusters),
      weights_(gaussian_matrix(output_dim, input_dim, std::sqrt(2.0 / static_cast<double>(input_dim)), rng)),
      bias_(output_dim, 0.0),
      weight_velocity_(output_dim, input_dim, 0.0),
      bias_velocity_(output_dim, 0.0) {
    if (input_dim == 0 || output_dim == 0)
        throw DomainError("BlockoutLayer: dimensions must be positive, got " +
                          std::to_string(input_dim) + "->" + std::to_string(output_dim));
    if (clusters < 1 || clusters > std::max(input_dim, output_dim))
        throw DomainError("BlockoutLayer: cluster count " + std::to_string(clusters) +
                          " outside [1, max(" + std::to_string(input_dim) + "," +
                          std::to_string(output_dim) + ")]");
    out_if_ = std::make_shared<ClusterInterface>(output_dim, clusters);
    in_if_ = std::make_shared<ClusterInterface>(input_dim, clusters);
}

void BlockoutLayer::share_input_interface(std::shared_ptr<ClusterInterface> upstream) {
    if (!upstream) throw StateError("share_input_interface: null interface");
    if (upstream->nodes() != input_dim() || upstream->clusters() != clusters_)
        throw ShapeError("share_input_interface: interface " +
                         std::to_string(upstream->nodes()) + "x" +
                         std::to_string(upstream->clusters()) + " does not match layer input " +
                         std::to_string(input_dim()) + "x" + std::to_string(clusters_));
    in_if_ = std::move(upstream);
    shared_in_ = true;
}

DenseMatrix BlockoutLayer::masked_weights(const DenseMatrix& c_out, const DenseMatrix& c_in) const {
    if (c_out.rows() != output_dim() || c_out.cols() != clusters_)
        throw ShapeError("masked_weights: output assignments " + c_out.shape_string() +
                         ", expected " + std::to_string(output_dim()) + "x" +
                         std::to_string(clusters_));
    if (c_in.rows() != input_dim() || c_in.cols() != clusters_)
        throw ShapeError("masked_weights: input assignments " + c_in.shape_string() +
                         ", expected " + std::to_string(input_dim()) + "x" +
                         std::to_string(clusters_));
    return hadamard(weights_, mask_from(c_out, c_in, clusters_));
}

DenseMatrix BlockoutLayer::inference_weights() const {
    return masked_weights(out_if_->probabilities(), in_if_->probabilities());
}

DenseMatrix BlockoutLayer::forward_with_assignments(const DenseMatrix& x, const DenseMatrix& c_out,
                                                    const DenseMatrix& c_in) const {
    DenseMatrix y = matmul(masked_weights(c_out, c_in), x);
    add_bias_rows(y, bias_);
    return y;
}

DenseMatrix BlockoutLayer::forward_train(const DenseMatrix& x, RngStream* rng,
                                         std::uint64_t iteration, SamplePolicy policy) {
    switch (policy) {
        case SamplePolicy::fresh:
            if (rng == nullptr)
                throw StateError("BlockoutLayer::forward_train: fresh sampling needs an rng");
            // Input side first; a shared interface was already stamped by the
            // upstream layer and keeps its draw.
            in_if_->sample(*rng, iteration);
            out_if_->sample(*rng, iteration);
            break;
        case SamplePolicy::soft:
            in_if_->assign_soft(iteration);
            out_if_->assign_soft(iteration);
            break;
        case SamplePolicy::reuse:
            if (!in_if_->has_assignments() || !out_if_->has_assignments())
                throw StateError("BlockoutLayer::forward_train: reuse policy with no assignments");
            break;
    }
    const DenseMatrix& c_out = out_if_->assignments();
    const DenseMatrix& c_in = in_if_->assignments();
    DenseMatrix mask = mask_from(c_out, c_in, clusters_);
    DenseMatrix y = matmul(hadamard(weights_, mask), x);
    add_bias_rows(y, bias_);
    state_ = ForwardState{x, c_out, c_in, std::move(mask), out_if_->assignment_iteration(),
                          in_if_->assignment_iteration()};
    return y;
}

DenseMatrix BlockoutLayer::forward_infer(const DenseMatrix& x) const {
    DenseMatrix y = matmul(inference_weights(), x);
    add_bias_rows(y, bias_);
    return y;
}

BlockoutGradients BlockoutLayer::backward_gradients(const DenseMatrix& delta) {
    if (!state_)
        throw StateError("BlockoutLayer::backward called without a cached forward state");
    if (out_if_->assignment_iteration() != state_->out_stamp ||
        in_if_->assignment_iteration() != state_->in_stamp)
        throw StateError("BlockoutLayer::backward: assignments were re-drawn after the forward "
                         "pass; the cached state is stale");
    if (delta.rows() != output_dim() || delta.cols() != state_->input.cols())
        throw ShapeError("BlockoutLayer::backward: delta " + delta.shape_string() +
                         " does not match outputs " + std::to_string(output_dim()) + "x" +
                         std::to_string(state_->input.cols()));

    const double k = static_cast<double>(clusters_);
    BlockoutGradients grads;
    // dL/dW over the masked weights, summed over the batch (the loss carries
    // the 1/B normalization in delta).
    DenseMatrix grad_w = matmul_abt(delta, state_->input);
    grads.weights = hadamard(grad_w, state_->mask);
    grads.bias = row_sums(delta);
    DenseMatrix wg = hadamard(weights_, grad_w);
    grads.c_out = matmul(wg, state_->c_in);
    for (double& v : grads.c_out.values()) v /= k;
    grads.c_in = matmul_atb(wg, state_->c_out);
    for (double& v : grads.c_in.values()) v /= k;
    grads.delta_prev = matmul_atb(hadamard(weights_, state_->mask), delta);
    state_.reset();
    return grads;
}

DenseMatrix BlockoutLayer::backward(const DenseMatrix& delta) {
    BlockoutGradients grads = backward_gradients(delta);
    out_if_->accumulate_gradient(grads.c_out);
    in_if_->accumulate_gradient(grads.c_in);
    grad_weights_ = std::move(grads.weights);
    grad_bias_ = std::move(grads.bias);
    return std::move(grads.delta_prev);
}

void BlockoutLayer::apply_update(double learning_rate, double momentum) {
    if (grad_weights_.empty()) return;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        double& v = weight_velocity_.values()[i];
        v = momentum * v - learning_rate * grad_weights_.values()[i];
        weights_.values()[i] += v;
    }
    for (std::size_t i = 0; i < bias_.size(); ++i) {
        double& v = bias_velocity_[i];
        v = momentum * v - learning_rate * grad_bias_[i];
        bias_[i] += v;
    }
}

}  // namespace blockout
