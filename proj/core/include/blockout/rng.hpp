#pragma once

#include <cstdint>

#include "blockout/matrix.hpp"

namespace blockout {

// Seeded random stream built on the splitmix64 counter generator: the state
// advances by a fixed odd constant and each output is a finalizing hash of
// the state. Pure 64-bit integer arithmetic plus a fixed double conversion,
// so identical seed + identical call sequence gives an identical sequence on
// every platform.
//
// A stream is single-owner; never share one across concurrent callers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes two uniforms per pair and
    // caches the second value.
    double next_gaussian();

    // Independent substream: deterministic function of (seed, tag). Used to
    // give dataset generation, parameter init and assignment sampling their
    // own streams under one run seed.
    RngStream derive(std::uint64_t tag) const;

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

// Entrywise Bernoulli draw: out(i,j) = 1 with probability p(i,j), else 0,
// independently, consuming the stream in row-major order. Every entry of p
// must lie in [0,1].
DenseMatrix bernoulli_sample(const DenseMatrix& p, RngStream& rng);

// rows x cols matrix of N(0, stddev^2) draws in row-major order.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double stddev, RngStream& rng);

}  // namespace blockout
