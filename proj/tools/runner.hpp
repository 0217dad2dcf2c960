#pragma once

#include <optional>
#include <string>

#include "blockout/network.hpp"
#include "blockout/training.hpp"
#include "run_config.hpp"

namespace blockout::cli {

struct PreparedData {
    Dataset train;
    std::optional<Dataset> eval;
    std::optional<Standardizer> scaler;
};

PreparedData prepare_data(const RunConfig& config);

// Layer stack from the config: dense+relu trunk over hidden_widths with the
// last two linear transforms replaced by Blockout layers (all of them when
// fewer than two exist), unless the variant is "dense". Weight init draws
// from a substream of the run seed.
Network build_network(const RunConfig& config, std::size_t input_dim, std::size_t classes);

struct RunResult {
    double train_accuracy;  // deterministic inference accuracy on the full train split
    double eval_accuracy;   // NaN when the config has no eval split
    std::string checkpoint_path;
    std::string log_path;
    std::string snapshots_path;
    std::string config_path;
};

// One complete training run: prepares data, trains, evaluates, and writes
// <output_dir>/<run_id>.{config.json, checkpoint.blko, log.csv, snapshots.bin}
// plus <run_id>.scaler.csv when standardization is on.
RunResult execute_training_run(const RunConfig& config);

}  // namespace blockout::cli
