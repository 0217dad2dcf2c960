#include "blockout/rng.hpp"

#include <cmath>

namespace blockout {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

double RngStream::next_gaussian() {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_gaussian_ = r * std::sin(theta);
    has_cached_gaussian_ = true;
    return r * std::cos(theta);
}

RngStream RngStream::derive(std::uint64_t tag) const {
    return RngStream(mix64(seed_ + 0x9E3779B97F4A7C15ULL * (tag + 1)));
}

DenseMatrix bernoulli_sample(const DenseMatrix& p, RngStream& rng) {
    DenseMatrix out(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double prob = p.values()[i];
        if (!(prob >= 0.0 && prob <= 1.0))
            throw DomainError("bernoulli_sample: probability " + std::to_string(prob) +
                              " outside [0,1] at flat index " + std::to_string(i));
        out.values()[i] = rng.next_uniform() < prob ? 1.0 : 0.0;
    }
    return out;
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double stddev, RngStream& rng) {
    DenseMatrix out(rows, cols);
    for (double& v : out.values()) v = stddev * rng.next_gaussian();
    return out;
}

}  // namespace blockout
