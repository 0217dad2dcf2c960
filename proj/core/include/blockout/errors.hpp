#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace blockout {

// Incompatible matrix shapes. The message always names both shapes.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Value outside the operation's admissible domain (probability outside [0,1],
// non-binary assignment entry, label out of range, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Misuse of the layer/network protocol: backward without a matching forward,
// consuming a forward state twice, mutating assignments between the two.
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

// Malformed binary or text artifact. Carries the byte offset at which
// decoding failed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t byte_offset, const std::string& what)
        : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Training produced a non-finite loss. Carries the diagnostic context the
// trainer could gather at the point of failure.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(std::uint64_t iteration, const std::string& layer, double max_abs_grad,
                     const std::string& what)
        : std::runtime_error(what),
          iteration_(iteration),
          layer_(layer),
          max_abs_grad_(max_abs_grad) {}

    std::uint64_t iteration() const { return iteration_; }
    const std::string& layer() const { return layer_; }
    double max_abs_grad() const { return max_abs_grad_; }

private:
    std::uint64_t iteration_;
    std::string layer_;
    double max_abs_grad_;
};

}  // namespace blockout
