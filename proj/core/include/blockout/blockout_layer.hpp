#pragma once

#include <memory>
#include <optional>

#include "blockout/cluster_interface.hpp"
#include "blockout/layers.hpp"

namespace blockout {

// Cluster-membership mask: mask(t,s) = (1/k) * (number of clusters containing
// both output node t and input node s). Entries lie in {0, 1/k, ..., 1}.
// c_out is output_dim x k, c_in is input_dim x k, both binary, and k must
// equal their column count.
DenseMatrix build_mask(const DenseMatrix& c_out, const DenseMatrix& c_in, std::size_t clusters);

// Everything the backward pass produces for one Blockout layer.
struct BlockoutGradients {
    DenseMatrix weights;            // dL/dW~ = dL/dW (*) mask
    std::vector<double> bias;       // column sums of delta over the batch
    DenseMatrix c_out;              // dL/dC_out = (1/k) [W~ (*) dL/dW] C_in
    DenseMatrix c_in;               // dL/dC_in  = (1/k) [W~ (*) dL/dW]^T C_out
    DenseMatrix delta_prev;         // W^T delta with W the masked matrix
};

// A linear layer whose effective weights are the unconstrained parameters
// W~ masked by cluster co-membership: W = W~ (*) (1/k) C_out C_in^T.
// Training draws binary C from the learned probabilities each iteration;
// inference substitutes the probabilities themselves, which is the
// expectation of the sampled mask.
class BlockoutLayer final : public Layer {
public:
    // Owns both interfaces; probabilities start at 0.5 (zero logits), W~ is
    // Gaussian with stddev sqrt(2/input_dim), bias is zero.
    // Requires 1 <= clusters <= max(input_dim, output_dim).
    BlockoutLayer(std::size_t input_dim, std::size_t output_dim, std::size_t clusters,
                  RngStream& rng);

    LayerKind kind() const override { return LayerKind::blockout; }
    std::size_t input_dim() const override { return weights_.cols(); }
    std::size_t output_dim() const override { return weights_.rows(); }
    std::size_t clusters() const { return clusters_; }

    // Unconstrained parameters; the cluster mask is applied on every forward.
    DenseMatrix& weights() { return weights_; }
    const DenseMatrix& weights() const { return weights_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& bias() const { return bias_; }

    const std::shared_ptr<ClusterInterface>& input_interface() const { return in_if_; }
    const std::shared_ptr<ClusterInterface>& output_interface() const { return out_if_; }

    // Replaces the owned input-side interface with the upstream layer's
    // output interface; the nodes between two adjacent Blockout layers then
    // have a single set of cluster parameters.
    void share_input_interface(std::shared_ptr<ClusterInterface> upstream);
    bool input_interface_shared() const { return shared_in_; }

    // W~ (*) (1/k) c_out c_in^T for arbitrary real assignment matrices.
    DenseMatrix masked_weights(const DenseMatrix& c_out, const DenseMatrix& c_in) const;
    // The deterministic inference matrix W~ (*) (1/k) P_out P_in^T.
    DenseMatrix inference_weights() const;

    // Stateless forward with explicit assignments (real-valued allowed).
    DenseMatrix forward_with_assignments(const DenseMatrix& x, const DenseMatrix& c_out,
                                         const DenseMatrix& c_in) const;

    // Training forward: resolves assignments per `policy` (at most one fresh
    // draw per interface per iteration), computes the masked product, and
    // caches the state the matching backward consumes.
    DenseMatrix forward_train(const DenseMatrix& x, RngStream* rng, std::uint64_t iteration,
                              SamplePolicy policy) override;

    DenseMatrix forward_infer(const DenseMatrix& x) const override;

    // Full backward pass over the cached state. Consumes the state; calling
    // it twice, or after the interfaces were re-sampled, raises StateError.
    // Pure with respect to the interfaces: accumulation of the assignment
    // gradients is the caller's job (adjacent layers sum into the shared
    // interface).
    BlockoutGradients backward_gradients(const DenseMatrix& delta);

    // Trainer-facing backward: runs backward_gradients, pushes the
    // assignment gradients into the two interfaces, stores the parameter
    // gradients for apply_update, and returns delta_prev.
    DenseMatrix backward(const DenseMatrix& delta) override;

    void apply_update(double learning_rate, double momentum) override;

    // Gradients stored by the last trainer-facing backward(), for inspection.
    const DenseMatrix& pending_weight_gradient() const { return grad_weights_; }
    const std::vector<double>& pending_bias_gradient() const { return grad_bias_; }

    bool has_forward_state() const { return state_.has_value(); }

private:
    struct ForwardState {
        DenseMatrix input;
        DenseMatrix c_out;
        DenseMatrix c_in;
        DenseMatrix mask;
        std::uint64_t out_stamp;
        std::uint64_t in_stamp;
    };

    std::size_t clusters_;
    DenseMatrix weights_;  // W~, output_dim x input_dim
    std::vector<double> bias_;
    DenseMatrix weight_velocity_;
    std::vector<double> bias_velocity_;
    std::shared_ptr<ClusterInterface> out_if_;
    std::shared_ptr<ClusterInterface> in_if_;
    bool shared_in_ = false;
    std::optional<ForwardState> state_;
    DenseMatrix grad_weights_;
    std::vector<double> grad_bias_;
};

// Factory matching the layer constructor; probabilities are 0.5 exactly.
inline BlockoutLayer init_layer(std::size_t input_dim, std::size_t output_dim,
                                std::size_t clusters, RngStream& rng) {
    return BlockoutLayer(input_dim, output_dim, clusters, rng);
}

}  // namespace blockout
