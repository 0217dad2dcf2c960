#pragma once

#include <string>
#include <vector>

#include "blockout/run_log.hpp"
#include "blockout/training.hpp"

namespace blockout {

// Per-(iteration, interface) histogram of probability entries over uniform
// bins on [0,1], plus the interpolated median. Counts always sum to the
// entry count of the snapshot.
struct SnapshotHistogram {
    std::uint64_t iteration;
    std::uint32_t interface_id;
    std::vector<std::uint64_t> counts;
    double median;
};

std::vector<SnapshotHistogram> probability_histogram(
    const std::vector<ProbabilitySnapshot>& series, std::size_t bins);

// Rows of P centered and projected onto the top-2 eigenvectors of their
// k x k covariance (power iteration with deflation, tolerance 1e-10, at most
// 10^4 iterations per eigenvector). Eigenvector signs are fixed by making the
// first loading of magnitude > 1e-12 positive. dominant_cluster is the
// per-row argmax of P, ties to the lowest index. Requires k >= 2.
struct PcaProjection {
    DenseMatrix coords;  // nodes x 2
    std::vector<std::size_t> dominant_cluster;
};

PcaProjection pca_project(const DenseMatrix& p);

// Row sums of the output-layer P: expected number of clusters serving each
// category, with the 25th/50th/75th percentiles over categories.
struct ClusterUsage {
    std::vector<double> expected;
    double p25;
    double p50;
    double p75;
};

ClusterUsage expected_clusters_per_category(const DenseMatrix& p_output);

// Interpolated percentile (q in [0,1]) used by the analyses above.
double percentile(std::vector<double> values, double q);

// The training curve as CSV text, identical in layout to the stored log:
// "iteration,train_loss,train_acc,eval_acc".
std::string convergence_table(const TrainingLog& log);

// CSV emission for the CLI. Files are named <run_id>.<analysis>.<interface>.csv
// inside `dir` (the curve has no interface part). Writers are deterministic:
// re-running produces byte-identical files.
void write_histogram_csvs(const std::string& dir, const std::string& run_id,
                          const std::vector<ProbabilitySnapshot>& snapshots, std::size_t bins);
// Final snapshot of each interface with at least 2 clusters.
void write_pca_csvs(const std::string& dir, const std::string& run_id,
                    const std::vector<ProbabilitySnapshot>& snapshots);
// Final snapshot of the last interface (the output-category side).
void write_cluster_csvs(const std::string& dir, const std::string& run_id,
                        const std::vector<ProbabilitySnapshot>& snapshots);
void write_curve_csv(const std::string& dir, const std::string& run_id, const TrainingLog& log);

}  // namespace blockout
