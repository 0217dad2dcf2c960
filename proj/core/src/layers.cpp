#include "blockout/layers.hpp"

#include <cmath>

namespace blockout {

void add_bias_rows(DenseMatrix& activations, const std::vector<double>& bias) {
    if (bias.size() != activations.rows())
        throw ShapeError("add_bias_rows: bias length " + std::to_string(bias.size()) +
                         " does not match activations " + activations.shape_string());
    for (std::size_t r = 0; r < activations.rows(); ++r)
        for (std::size_t c = 0; c < activations.cols(); ++c) activations(r, c) += bias[r];
}

DenseLayer::DenseLayer(std::size_t input_dim, std::size_t output_dim, RngStream& rng)
    : weights_(gaussian_matrix(output_dim, input_dim, std::sqrt(2.0 / static_cast<double>(input_dim)), rng)),
      bias_(output_dim, 0.0),
      weight_velocity_(output_dim, input_dim, 0.0),
      bias_velocity_(output_dim, 0.0) {
    if (input_dim == 0 || output_dim == 0)
        throw DomainError("DenseLayer: dimensions must be positive, got " +
                          std::to_string(input_dim) + "->" + std::to_string(output_dim));
}

DenseMatrix DenseLayer::forward_train(const DenseMatrix& x, RngStream*, std::uint64_t,
                                      SamplePolicy) {
    cached_input_ = x;
    DenseMatrix y = matmul(weights_, x);
    add_bias_rows(y, bias_);
    return y;
}

DenseMatrix DenseLayer::forward_infer(const DenseMatrix& x) const {
    DenseMatrix y = matmul(weights_, x);
    add_bias_rows(y, bias_);
    return y;
}

DenseMatrix DenseLayer::backward(const DenseMatrix& delta) {
    if (!cached_input_)
        throw StateError("DenseLayer::backward called without a cached forward state");
    grad_weights_ = matmul_abt(delta, *cached_input_);
    grad_bias_ = row_sums(delta);
    cached_input_.reset();
    return matmul_atb(weights_, delta);
}

void DenseLayer::apply_update(double learning_rate, double momentum) {
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

DenseMatrix ReluLayer::forward_train(const DenseMatrix& x, RngStream*, std::uint64_t,
                                     SamplePolicy) {
    cached_input_ = x;
    DenseMatrix y = x;
    for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
    return y;
}

DenseMatrix ReluLayer::forward_infer(const DenseMatrix& x) const {
    DenseMatrix y = x;
    for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
    return y;
}

DenseMatrix ReluLayer::backward(const DenseMatrix& delta) {
    if (!cached_input_)
        throw StateError("ReluLayer::backward called without a cached forward state");
    if (!delta.same_shape(*cached_input_))
        throw ShapeError("ReluLayer::backward: incompatible shapes " + delta.shape_string() +
                         " and " + cached_input_->shape_string());
    DenseMatrix out = delta;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (cached_input_->values()[i] <= 0.0) out.values()[i] = 0.0;
    cached_input_.reset();
    return out;
}

SoftmaxResult softmax_cross_entropy(const DenseMatrix& logits,
                                    const std::vector<std::uint16_t>& labels) {
    const std::size_t classes = logits.rows();
    const std::size_t batch = logits.cols();
    if (labels.size() != batch)
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for logits " + logits.shape_string());
    SoftmaxResult result{0.0, DenseMatrix(classes, batch)};
    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (std::size_t j = 0; j < batch; ++j) {
        const std::uint16_t label = labels[j];
        if (label >= classes)
            throw DomainError("softmax_cross_entropy: label " + std::to_string(label) +
                              " out of range [0," + std::to_string(classes) + ") at column " +
                              std::to_string(j));
        double max_logit = logits(0, j);
        for (std::size_t r = 1; r < classes; ++r) max_logit = std::max(max_logit, logits(r, j));
        double z = 0.0;
        for (std::size_t r = 0; r < classes; ++r) z += std::exp(logits(r, j) - max_logit);
        const double log_z = std::log(z);
        result.loss += (log_z - (logits(label, j) - max_logit)) * inv_batch;
        for (std::size_t r = 0; r < classes; ++r) {
            const double p = std::exp(logits(r, j) - max_logit) / z;
            result.grad(r, j) = (p - (r == label ? 1.0 : 0.0)) * inv_batch;
        }
    }
    return result;
}

}  // namespace blockout
