#include "blockout/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "io_util.hpp"

namespace blockout {

Dataset generate_hierarchical(const HierarchicalSpec& spec) {
    if (spec.superclasses == 0 || spec.subclasses_per == 0 || spec.dim == 0 || spec.per_class == 0)
        throw DomainError("generate_hierarchical: counts must be positive");
    if (spec.intra_spread < 0.0 || spec.inter_spread < 0.0)
        throw DomainError("generate_hierarchical: spreads must be non-negative");

    const std::size_t classes = spec.superclasses * spec.subclasses_per;
    if (classes > 65535)
        throw DomainError("generate_hierarchical: " + std::to_string(classes) +
                          " classes exceed the u16 label range");
    const std::size_t n = classes * spec.per_class;

    // Centers use a stream keyed by the seed alone; sample noise uses a
    // stream keyed by (seed, sample_split). Draw order is fixed: superclass
    // centers, then per superclass its subclass centers, then samples
    // class-major. Same spec, same dataset.
    RngStream center_rng = RngStream(spec.seed).derive(0);
    RngStream rng = RngStream(spec.seed).derive(1 + spec.sample_split);
    DenseMatrix super_centers =
        gaussian_matrix(spec.superclasses, spec.dim, spec.inter_spread, center_rng);
    DenseMatrix sub_centers(classes, spec.dim);
    for (std::size_t s = 0; s < spec.superclasses; ++s) {
        for (std::size_t j = 0; j < spec.subclasses_per; ++j) {
            const std::size_t c = s * spec.subclasses_per + j;
            for (std::size_t d = 0; d < spec.dim; ++d)
                sub_centers(c, d) =
                    super_centers(s, d) + spec.intra_spread * center_rng.next_gaussian();
        }
    }

    Dataset out;
    out.features = DenseMatrix(n, spec.dim);
    out.labels.resize(n);
    out.num_classes = classes;
    out.superclass_of.resize(classes);
    for (std::size_t c = 0; c < classes; ++c)
        out.superclass_of[c] = static_cast<std::uint16_t>(c / spec.subclasses_per);

    std::size_t row = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < spec.per_class; ++i, ++row) {
            for (std::size_t d = 0; d < spec.dim; ++d)
                out.features(row, d) = sub_centers(c, d) + rng.next_gaussian();
            out.labels[row] = static_cast<std::uint16_t>(c);
        }
    }
    out.class_centers = std::move(sub_centers);
    return out;
}

Dataset load_binary(const std::string& path) {
    detail::ByteReader reader(detail::read_file_bytes(path));
    reader.expect_magic("BODS");
    const std::uint16_t version = reader.u16("version");
    if (version != 1)
        reader.fail("unsupported dataset version " + std::to_string(version));
    const std::uint64_t n = reader.u64("example count");
    const std::uint32_t dim = reader.u32("dimension");
    const std::uint32_t num_classes = reader.u32("class count");
    if (dim == 0) reader.fail("dimension must be positive");
    if (num_classes == 0) reader.fail("class count must be positive");
    if (n > (std::size_t{1} << 32) || static_cast<std::uint64_t>(dim) * n > (std::size_t{1} << 34))
        reader.fail("implausible dataset size: " + std::to_string(n) + " x " + std::to_string(dim));

    Dataset out;
    out.features = DenseMatrix(static_cast<std::size_t>(n), dim);
    out.labels.resize(static_cast<std::size_t>(n));
    out.num_classes = num_classes;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint32_t d = 0; d < dim; ++d)
            out.features(static_cast<std::size_t>(i), d) =
                static_cast<double>(reader.f32("feature"));
        const std::uint16_t label = reader.u16("label");
        if (label >= num_classes)
            reader.fail("record " + std::to_string(i) + ": label " + std::to_string(label) +
                        " out of range [0," + std::to_string(num_classes) + ")");
        out.labels[static_cast<std::size_t>(i)] = label;
    }
    reader.expect_exhausted();
    return out;
}

void save_binary(const Dataset& dataset, const std::string& path) {
    if (dataset.num_classes == 0 || dataset.num_classes > 65535)
        throw DomainError("save_binary: class count " + std::to_string(dataset.num_classes) +
                          " outside [1, 65535]");
    if (dataset.labels.size() != dataset.size())
        throw ShapeError("save_binary: " + std::to_string(dataset.labels.size()) +
                         " labels for " + std::to_string(dataset.size()) + " examples");
    detail::ByteWriter writer;
    writer.magic("BODS");
    writer.u16(1);
    writer.u64(dataset.size());
    writer.u32(static_cast<std::uint32_t>(dataset.dim()));
    writer.u32(static_cast<std::uint32_t>(dataset.num_classes));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t d = 0; d < dataset.dim(); ++d)
            writer.f32(static_cast<float>(dataset.features(i, d)));
        writer.u16(dataset.labels[i]);
    }
    detail::write_file_bytes(path, writer.bytes());
}

Standardizer fit_standardizer(const Dataset& dataset) {
    if (dataset.size() == 0) throw DomainError("fit_standardizer: empty dataset");
    const std::size_t dim = dataset.dim();
    Standardizer t{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
    const double inv_n = 1.0 / static_cast<double>(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t d = 0; d < dim; ++d) t.mean[d] += dataset.features(i, d);
    for (std::size_t d = 0; d < dim; ++d) t.mean[d] *= inv_n;
    std::vector<double> var(dim, 0.0);
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t d = 0; d < dim; ++d) {
            const double centered = dataset.features(i, d) - t.mean[d];
            var[d] += centered * centered;
        }
    for (std::size_t d = 0; d < dim; ++d) {
        const double s = std::sqrt(var[d] * inv_n);
        t.stddev[d] = s > 1e-12 ? s : 1.0;
    }
    return t;
}

Dataset standardized(const Dataset& dataset, const Standardizer& transform) {
    if (transform.mean.size() != dataset.dim() || transform.stddev.size() != dataset.dim())
        throw ShapeError("standardized: transform of dimension " +
                         std::to_string(transform.mean.size()) + " applied to dataset of dimension " +
                         std::to_string(dataset.dim()));
    Dataset out = dataset;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t d = 0; d < out.dim(); ++d)
            out.features(i, d) = (out.features(i, d) - transform.mean[d]) / transform.stddev[d];
    return out;
}

BatchIterator::BatchIterator(const Dataset& dataset, std::size_t batch_size, RngStream rng)
    : dataset_(&dataset), batch_size_(batch_size), rng_(rng) {
    if (dataset.size() == 0) throw DomainError("BatchIterator: empty dataset");
    if (batch_size == 0 || batch_size > dataset.size())
        throw DomainError("BatchIterator: batch size " + std::to_string(batch_size) +
                          " outside [1, " + std::to_string(dataset.size()) + "]");
    order_.resize(dataset.size());
    reshuffle();
}

void BatchIterator::reshuffle() {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    // Fisher-Yates on our own stream; std::shuffle is not seed-stable across
    // standard libraries.
    for (std::size_t i = order_.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng_.next_u64() % i);
        std::swap(order_[i - 1], order_[j]);
    }
    cursor_ = 0;
}

BatchIterator::Batch BatchIterator::next() {
    if (cursor_ >= order_.size()) {
        ++epoch_;
        reshuffle();
    }
    const std::size_t count = std::min(batch_size_, order_.size() - cursor_);
    Batch batch{DenseMatrix(dataset_->dim(), count), std::vector<std::uint16_t>(count)};
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t row = order_[cursor_ + j];
        for (std::size_t d = 0; d < dataset_->dim(); ++d)
            batch.features(d, j) = dataset_->features(row, d);
        batch.labels[j] = dataset_->labels[row];
    }
    cursor_ += count;
    return batch;
}

}  // namespace blockout
