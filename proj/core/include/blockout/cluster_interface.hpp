#pragma once

#include <cstdint>
#include <limits>

#include "blockout/matrix.hpp"
#include "blockout/rng.hpp"

namespace blockout {

// Assignment-gradient masking: gradients of unselected clusters are zeroed,
// dL/dP = dL/dC (*) C. Requires binary c.
DenseMatrix prob_gradient(const DenseMatrix& grad_c, const DenseMatrix& c);

// Cluster-membership parameters for one interface of nodes (the nodes between
// two consecutive linear layers, or a layer's input/output boundary).
//
// Owns the logits theta (nodes x clusters), so P = logistic(theta) entrywise,
// together with the current assignment draw C, the accumulated assignment
// gradient, and the momentum buffer for theta. When two Blockout layers are
// adjacent they hold the same ClusterInterface object, so the nodes between
// them are assigned once per iteration and the gradient contributions of both
// layers accumulate into one buffer.
class ClusterInterface {
public:
    ClusterInterface(std::size_t nodes, std::size_t clusters);

    std::size_t nodes() const { return theta_.rows(); }
    std::size_t clusters() const { return theta_.cols(); }

    const DenseMatrix& logits() const { return theta_; }
    DenseMatrix& logits() { return theta_; }

    // P = logistic(theta), computed on demand.
    DenseMatrix probabilities() const { return logistic(theta_); }

    // Draw C ~ B(1, P) for `iteration`. At most one draw happens per
    // iteration: a second call with the same stamp (the adjacent layer)
    // leaves the existing draw in place. Frozen interfaces only re-stamp.
    void sample(RngStream& rng, std::uint64_t iteration);

    // Soft relaxation: C := P for `iteration`, no sampling. Same once-per-
    // iteration collapse as sample().
    void assign_soft(std::uint64_t iteration);

    // Pin C to a fixed matrix (binary or real); sample()/assign_soft() become
    // stamp-only no-ops until unfreeze(). Used for fixed-assignment training
    // reductions and finite-difference checks.
    void freeze(DenseMatrix c);
    void unfreeze() { frozen_ = false; }
    bool frozen() const { return frozen_; }

    const DenseMatrix& assignments() const { return c_; }
    std::uint64_t assignment_iteration() const { return stamp_; }
    bool has_assignments() const { return stamp_ != kNoIteration; }

    void clear_gradient();
    void accumulate_gradient(const DenseMatrix& grad_c);
    const DenseMatrix& gradient() const { return grad_c_; }

    // Momentum step on theta from the accumulated assignment gradient.
    // mask_unselected selects the hard-sampling rule (dL/dP = dL/dC (*) C);
    // the soft variant back-propagates dL/dC unmasked. Either way the
    // gradient is then chained through the logistic, theta is clamped to
    // [-kLogitClamp, kLogitClamp], and the accumulator is cleared.
    void apply_update(double learning_rate, double momentum, bool mask_unselected);

    static constexpr double kLogitClamp = 8.0;
    static constexpr std::uint64_t kNoIteration = std::numeric_limits<std::uint64_t>::max();

private:
    DenseMatrix theta_;
    DenseMatrix velocity_;
    DenseMatrix c_;
    DenseMatrix grad_c_;
    std::uint64_t stamp_ = kNoIteration;
    bool frozen_ = false;
};

}  // namespace blockout
