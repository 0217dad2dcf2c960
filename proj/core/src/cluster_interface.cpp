#include "blockout/cluster_interface.hpp"

#include <algorithm>

namespace blockout {

DenseMatrix prob_gradient(const DenseMatrix& grad_c, const DenseMatrix& c) {
    if (!grad_c.same_shape(c))
        throw ShapeError("prob_gradient: incompatible shapes " + grad_c.shape_string() + " and " +
                         c.shape_string());
    for (double v : c.values())
        if (v != 0.0 && v != 1.0)
            throw DomainError("prob_gradient: assignment entry " + std::to_string(v) +
                              " is not binary");
    return hadamard(grad_c, c);
}

ClusterInterface::ClusterInterface(std::size_t nodes, std::size_t clusters)
    : theta_(nodes, clusters, 0.0),  // theta = 0 puts every probability at 0.5
      velocity_(nodes, clusters, 0.0),
      c_(nodes, clusters, 0.0),
      grad_c_(nodes, clusters, 0.0) {
    if (nodes == 0 || clusters == 0)
        throw DomainError("ClusterInterface: nodes and clusters must be positive, got " +
                          std::to_string(nodes) + "x" + std::to_string(clusters));
}

void ClusterInterface::sample(RngStream& rng, std::uint64_t iteration) {
    if (stamp_ == iteration) return;
    if (!frozen_) c_ = bernoulli_sample(probabilities(), rng);
    stamp_ = iteration;
}

void ClusterInterface::assign_soft(std::uint64_t iteration) {
    if (stamp_ == iteration) return;
    if (!frozen_) c_ = probabilities();
    stamp_ = iteration;
}

void ClusterInterface::freeze(DenseMatrix c) {
    if (!c.same_shape(theta_))
        throw ShapeError("ClusterInterface::freeze: incompatible shapes " + c.shape_string() +
                         " and " + theta_.shape_string());
    c_ = std::move(c);
    frozen_ = true;
    if (stamp_ == kNoIteration) stamp_ = 0;
}

void ClusterInterface::clear_gradient() {
    std::fill(grad_c_.values().begin(), grad_c_.values().end(), 0.0);
}

void ClusterInterface::accumulate_gradient(const DenseMatrix& grad_c) {
    if (!grad_c.same_shape(grad_c_))
        throw ShapeError("ClusterInterface::accumulate_gradient: incompatible shapes " +
                         grad_c.shape_string() + " and " + grad_c_.shape_string());
    for (std::size_t i = 0; i < grad_c_.size(); ++i) grad_c_.values()[i] += grad_c.values()[i];
}

void ClusterInterface::apply_update(double learning_rate, double momentum, bool mask_unselected) {
    const DenseMatrix grad_p = mask_unselected ? prob_gradient(grad_c_, c_) : grad_c_;
    for (std::size_t i = 0; i < theta_.size(); ++i) {
        const double g = grad_p.values()[i] * logistic_derivative(theta_.values()[i]);
        double& v = velocity_.values()[i];
        v = momentum * v - learning_rate * g;
        theta_.values()[i] = std::clamp(theta_.values()[i] + v, -kLogitClamp, kLogitClamp);
    }
    clear_gradient();
}

}  // namespace blockout
