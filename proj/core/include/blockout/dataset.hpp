#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockout/matrix.hpp"
#include "blockout/rng.hpp"

namespace blockout {

// A labelled feature set. Features are one example per row; labels index
// [0, num_classes). superclass_of maps a fine-grained class to its
// superclass for synthetic hierarchical data (empty otherwise). Immutable
// after construction/load; safe for concurrent reads.
struct Dataset {
    DenseMatrix features;  // n x dim
    std::vector<std::uint16_t> labels;
    std::size_t num_classes = 0;
    std::vector<std::uint16_t> superclass_of;
    // Synthetic-generation metadata (num_classes x dim); empty for loaded
    // files. Not part of the on-disk format.
    DenseMatrix class_centers;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

// Two-level Gaussian mixture: superclass centers at scale inter_spread,
// subclass centers offset from their superclass at scale intra_spread, unit
// sample noise around subclass centers. Fine-grained class ids enumerate
// subclasses superclass-major, so class c belongs to superclass c / subclasses_per.
//
// Centers depend only on the seed; sample noise comes from a substream
// selected by sample_split. Two specs sharing a seed but differing in
// sample_split draw independent example sets from the same mixture, which is
// how a train/eval pair is made.
struct HierarchicalSpec {
    std::uint64_t seed = 1;
    std::size_t superclasses = 4;
    std::size_t subclasses_per = 5;
    std::size_t dim = 32;
    std::size_t per_class = 200;
    double intra_spread = 1.0;
    double inter_spread = 10.0;
    std::uint64_t sample_split = 0;
};

Dataset generate_hierarchical(const HierarchicalSpec& spec);

// Binary dataset file, little-endian:
//   magic "BODS" | u16 version=1 | u64 n | u32 dim | u32 num_classes |
//   n records of (dim x f32 features, u16 label).
// Features are float32 on disk and widened to float64 in memory. Loading is
// total: any malformed input raises ParseError with a byte offset, never a
// crash.
Dataset load_binary(const std::string& path);
void save_binary(const Dataset& dataset, const std::string& path);

// Per-dimension affine transform to zero mean / unit variance, fit on a
// training split and applied to any split. Dimensions with (near-)zero
// variance pass through unscaled.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;
};

Standardizer fit_standardizer(const Dataset& dataset);
Dataset standardized(const Dataset& dataset, const Standardizer& transform);

// Serves each epoch as one random permutation of the dataset: every example
// exactly once per epoch, last batch possibly short. Single-owner.
class BatchIterator {
public:
    struct Batch {
        DenseMatrix features;  // dim x batch, one example per column
        std::vector<std::uint16_t> labels;
    };

    BatchIterator(const Dataset& dataset, std::size_t batch_size, RngStream rng);

    Batch next();
    std::uint64_t epoch() const { return epoch_; }

private:
    void reshuffle();

    const Dataset* dataset_;
    std::size_t batch_size_;
    RngStream rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::uint64_t epoch_ = 0;
};

}  // namespace blockout
