#include "blockout/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "io_util.hpp"

namespace blockout {

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw DomainError("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<SnapshotHistogram> probability_histogram(
    const std::vector<ProbabilitySnapshot>& series, std::size_t bins) {
    if (bins < 2) throw DomainError("probability_histogram: need at least 2 bins");
    if (series.empty()) throw DomainError("probability_histogram: empty snapshot series");
    std::vector<SnapshotHistogram> out;
    out.reserve(series.size());
    for (const ProbabilitySnapshot& snap : series) {
        SnapshotHistogram hist{snap.iteration, snap.interface_id,
                               std::vector<std::uint64_t>(bins, 0), 0.0};
        for (double v : snap.p.values()) {
            const double clamped = std::clamp(v, 0.0, 1.0);
            std::size_t bin = static_cast<std::size_t>(clamped * static_cast<double>(bins));
            if (bin >= bins) bin = bins - 1;
            ++hist.counts[bin];
        }
        hist.median = percentile(snap.p.values(), 0.5);
        out.push_back(std::move(hist));
    }
    return out;
}

namespace {

struct EigenPair {
    double value;
    std::vector<double> vector;
};

// Dominant eigenpair of a symmetric matrix by power iteration, restricted to
// the complement of the already-extracted eigenvectors (every iterate is
// re-orthogonalized against them, so deflation cannot leak roundoff back into
// an earlier direction). A (numerically) zero matrix reports eigenvalue 0
// with the start direction.
EigenPair dominant_eigenpair(const DenseMatrix& a, const std::vector<EigenPair>& found,
                             RngStream& rng) {
    const std::size_t n = a.rows();
    constexpr double tol = 1e-10;
    constexpr std::size_t max_iterations = 10000;

    const auto orthogonalize = [&](std::vector<double>& x) {
        for (const EigenPair& prev : found) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += x[i] * prev.vector[i];
            for (std::size_t i = 0; i < n; ++i) x[i] -= dot * prev.vector[i];
        }
    };

    std::vector<double> v(n);
    for (double& x : v) x = rng.next_gaussian();
    orthogonalize(v);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-300) return {0.0, std::vector<double>(n, 0.0)};
    for (double& x : v) x /= norm;

    double value = 0.0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += a(i, j) * v[j];
        orthogonalize(w);
        double wnorm = 0.0;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            wnorm += w[i] * w[i];
            dot += w[i] * v[i];
        }
        wnorm = std::sqrt(wnorm);
        value = dot;  // Rayleigh quotient with unit v
        if (wnorm < 1e-300) return {0.0, v};
        const double sign = dot < 0.0 ? -1.0 : 1.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = sign * w[i] / wnorm;
            diff = std::max(diff, std::abs(next - v[i]));
            v[i] = next;
        }
        if (diff < tol) break;
    }
    return {value, v};
}

void fix_sign(std::vector<double>& v) {
    for (double x : v) {
        if (std::abs(x) > 1e-12) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

}  // namespace

PcaProjection pca_project(const DenseMatrix& p) {
    const std::size_t nodes = p.rows();
    const std::size_t k = p.cols();
    if (k < 2)
        throw DomainError("pca_project: need at least 2 clusters, got " + std::to_string(k));

    // Center the rows.
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = 0; j < k; ++j) mean[j] += p(i, j);
    for (double& m : mean) m /= static_cast<double>(nodes);
    DenseMatrix centered(nodes, k);
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = 0; j < k; ++j) centered(i, j) = p(i, j) - mean[j];

    DenseMatrix cov = matmul_atb(centered, centered);
    const double denom = nodes > 1 ? static_cast<double>(nodes - 1) : 1.0;
    for (double& v : cov.values()) v /= denom;

    // Fixed-seed start directions keep the output reproducible.
    RngStream rng(0x5CA1AB1Eu);
    std::vector<EigenPair> found;
    EigenPair first = dominant_eigenpair(cov, found, rng);
    fix_sign(first.vector);
    found.push_back(first);
    DenseMatrix deflated = cov;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            deflated(i, j) -= first.value * first.vector[i] * first.vector[j];
    EigenPair second = dominant_eigenpair(deflated, found, rng);
    fix_sign(second.vector);

    PcaProjection out;
    out.coords = DenseMatrix(nodes, 2);
    for (std::size_t i = 0; i < nodes; ++i) {
        double c1 = 0.0;
        double c2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            c1 += centered(i, j) * first.vector[j];
            c2 += centered(i, j) * second.vector[j];
        }
        out.coords(i, 0) = c1;
        out.coords(i, 1) = c2;
    }
    out.dominant_cluster = argmax_rows(p);
    return out;
}

ClusterUsage expected_clusters_per_category(const DenseMatrix& p_output) {
    ClusterUsage usage;
    usage.expected = row_sums(p_output);
    usage.p25 = percentile(usage.expected, 0.25);
    usage.p50 = percentile(usage.expected, 0.50);
    usage.p75 = percentile(usage.expected, 0.75);
    return usage;
}

std::string convergence_table(const TrainingLog& log) {
    std::string out = "iteration,train_loss,train_acc,eval_acc\n";
    std::size_t next_eval = 0;
    std::uint64_t previous = 0;
    bool first = true;
    for (const IterationStat& stat : log.iterations) {
        if (!first && stat.iteration <= previous)
            throw DomainError("convergence_table: iteration column is not strictly increasing");
        previous = stat.iteration;
        first = false;
        out += std::to_string(stat.iteration);
        out += ',';
        out += format_double(stat.loss);
        out += ',';
        out += format_double(stat.accuracy);
        out += ',';
        while (next_eval < log.evals.size() && log.evals[next_eval].iteration < stat.iteration)
            ++next_eval;
        if (next_eval < log.evals.size() && log.evals[next_eval].iteration == stat.iteration) {
            out += format_double(log.evals[next_eval].accuracy);
            ++next_eval;
        }
        out += '\n';
    }
    return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    detail::write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::map<std::uint32_t, const ProbabilitySnapshot*> final_snapshots(
    const std::vector<ProbabilitySnapshot>& snapshots) {
    std::map<std::uint32_t, const ProbabilitySnapshot*> latest;
    for (const ProbabilitySnapshot& snap : snapshots) {
        auto [it, inserted] = latest.try_emplace(snap.interface_id, &snap);
        if (!inserted && snap.iteration >= it->second->iteration) it->second = &snap;
    }
    return latest;
}

}  // namespace

void write_histogram_csvs(const std::string& dir, const std::string& run_id,
                          const std::vector<ProbabilitySnapshot>& snapshots, std::size_t bins) {
    const std::vector<SnapshotHistogram> hists = probability_histogram(snapshots, bins);
    std::map<std::uint32_t, std::string> per_interface;
    for (const SnapshotHistogram& hist : hists) {
        std::string& text = per_interface[hist.interface_id];
        if (text.empty()) text = "iteration,bin,lo,hi,count,median\n";
        for (std::size_t b = 0; b < hist.counts.size(); ++b) {
            const double width = 1.0 / static_cast<double>(hist.counts.size());
            text += std::to_string(hist.iteration);
            text += ',';
            text += std::to_string(b);
            text += ',';
            text += format_double(static_cast<double>(b) * width);
            text += ',';
            text += format_double(static_cast<double>(b + 1) * width);
            text += ',';
            text += std::to_string(hist.counts[b]);
            text += ',';
            text += format_double(hist.median);
            text += '\n';
        }
    }
    for (const auto& [interface_id, text] : per_interface)
        write_text(dir + "/" + run_id + ".hist." + std::to_string(interface_id) + ".csv", text);
}

void write_pca_csvs(const std::string& dir, const std::string& run_id,
                    const std::vector<ProbabilitySnapshot>& snapshots) {
    for (const auto& [interface_id, snap] : final_snapshots(snapshots)) {
        if (snap->p.cols() < 2) continue;  // a k=1 interface has no 2-D projection
        const PcaProjection projection = pca_project(snap->p);
        std::string text = "node,pc1,pc2,dominant_cluster\n";
        for (std::size_t i = 0; i < projection.coords.rows(); ++i) {
            text += std::to_string(i);
            text += ',';
            text += format_double(projection.coords(i, 0));
            text += ',';
            text += format_double(projection.coords(i, 1));
            text += ',';
            text += std::to_string(projection.dominant_cluster[i]);
            text += '\n';
        }
        write_text(dir + "/" + run_id + ".pca." + std::to_string(interface_id) + ".csv", text);
    }
}

void write_cluster_csvs(const std::string& dir, const std::string& run_id,
                        const std::vector<ProbabilitySnapshot>& snapshots) {
    const auto latest = final_snapshots(snapshots);
    if (latest.empty()) throw DomainError("write_cluster_csvs: no snapshots");
    const auto& [interface_id, snap] = *latest.rbegin();  // output-category side
    const ClusterUsage usage = expected_clusters_per_category(snap->p);
    std::string text = "category,expected_clusters,p25,p50,p75\n";
    for (std::size_t c = 0; c < usage.expected.size(); ++c) {
        text += std::to_string(c);
        text += ',';
        text += format_double(usage.expected[c]);
        text += ',';
        text += format_double(usage.p25);
        text += ',';
        text += format_double(usage.p50);
        text += ',';
        text += format_double(usage.p75);
        text += '\n';
    }
    write_text(dir + "/" + run_id + ".clusters." + std::to_string(interface_id) + ".csv", text);
}

void write_curve_csv(const std::string& dir, const std::string& run_id, const TrainingLog& log) {
    write_text(dir + "/" + run_id + ".curve.csv", convergence_table(log));
}

}  // namespace blockout
