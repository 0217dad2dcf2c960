#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockout/matrix.hpp"
#include "blockout/rng.hpp"

namespace blockout {

enum class LayerKind : std::uint8_t {
    dense = 0,
    blockout = 1,
    relu = 2,
    softmax_loss = 3,
};

// How a training forward pass obtains cluster assignments.
//   fresh  - draw C ~ B(1, P) once per interface per iteration
//   soft   - C := P, no sampling (deterministic relaxation)
//   reuse  - keep whatever assignments the interfaces currently hold
//            (fixed-assignment reductions, finite-difference checks)
enum class SamplePolicy { fresh, soft, reuse };

class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerKind kind() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t output_dim() const = 0;

    // Training-mode forward: caches whatever the matching backward needs.
    // rng may be null for policies that never sample.
    virtual DenseMatrix forward_train(const DenseMatrix& x, RngStream* rng,
                                      std::uint64_t iteration, SamplePolicy policy) = 0;

    // Inference forward: deterministic, caches nothing.
    virtual DenseMatrix forward_infer(const DenseMatrix& x) const = 0;

    // Consumes the cached forward state, stores parameter gradients
    // internally, and returns the gradient with respect to the layer input.
    virtual DenseMatrix backward(const DenseMatrix& delta) = 0;

    // Momentum step (velocity = momentum * velocity - lr * grad) from the
    // gradients stored by the last backward().
    virtual void apply_update(double learning_rate, double momentum) = 0;
};

// Fully-connected layer, unmasked: y = W x + bias.
class DenseLayer final : public Layer {
public:
    DenseLayer(std::size_t input_dim, std::size_t output_dim, RngStream& rng);

    LayerKind kind() const override { return LayerKind::dense; }
    std::size_t input_dim() const override { return weights_.cols(); }
    std::size_t output_dim() const override { return weights_.rows(); }

    DenseMatrix& weights() { return weights_; }
    const DenseMatrix& weights() const { return weights_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& bias() const { return bias_; }

    DenseMatrix forward_train(const DenseMatrix& x, RngStream* rng, std::uint64_t iteration,
                              SamplePolicy policy) override;
    DenseMatrix forward_infer(const DenseMatrix& x) const override;
    DenseMatrix backward(const DenseMatrix& delta) override;
    void apply_update(double learning_rate, double momentum) override;

    // Gradients stored by the last backward(), for inspection in tests.
    const DenseMatrix& pending_weight_gradient() const { return grad_weights_; }
    const std::vector<double>& pending_bias_gradient() const { return grad_bias_; }

private:
    DenseMatrix weights_;  // output_dim x input_dim
    std::vector<double> bias_;
    DenseMatrix weight_velocity_;
    std::vector<double> bias_velocity_;
    std::optional<DenseMatrix> cached_input_;
    DenseMatrix grad_weights_;
    std::vector<double> grad_bias_;
};

class ReluLayer final : public Layer {
public:
    explicit ReluLayer(std::size_t width) : width_(width) {}

    LayerKind kind() const override { return LayerKind::relu; }
    std::size_t input_dim() const override { return width_; }
    std::size_t output_dim() const override { return width_; }

    DenseMatrix forward_train(const DenseMatrix& x, RngStream* rng, std::uint64_t iteration,
                              SamplePolicy policy) override;
    DenseMatrix forward_infer(const DenseMatrix& x) const override;
    DenseMatrix backward(const DenseMatrix& delta) override;
    void apply_update(double, double) override {}

private:
    std::size_t width_;
    std::optional<DenseMatrix> cached_input_;
};

// Terminal marker of a classification network. Forward passes logits
// through unchanged; the trainer computes the loss and its gradient with
// softmax_cross_entropy below.
class SoftmaxLossLayer final : public Layer {
public:
    explicit SoftmaxLossLayer(std::size_t classes) : classes_(classes) {}

    LayerKind kind() const override { return LayerKind::softmax_loss; }
    std::size_t input_dim() const override { return classes_; }
    std::size_t output_dim() const override { return classes_; }
    std::size_t classes() const { return classes_; }

    DenseMatrix forward_train(const DenseMatrix& x, RngStream*, std::uint64_t,
                              SamplePolicy) override {
        return x;
    }
    DenseMatrix forward_infer(const DenseMatrix& x) const override { return x; }
    DenseMatrix backward(const DenseMatrix& delta) override { return delta; }
    void apply_update(double, double) override {}

private:
    std::size_t classes_;
};

struct SoftmaxResult {
    double loss;       // mean negative log-likelihood over the batch
    DenseMatrix grad;  // (softmax - onehot) / batch, classes x batch
};

// logits: classes x batch, labels: one per column, each in [0, classes).
SoftmaxResult softmax_cross_entropy(const DenseMatrix& logits,
                                    const std::vector<std::uint16_t>& labels);

// Adds bias[r] to every entry of row r.
void add_bias_rows(DenseMatrix& activations, const std::vector<double>& bias);

}  // namespace blockout
