#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockout/dataset.hpp"

namespace blockout::cli {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat JSON run configuration. Every key is optional with the default shown
// in parse_run_config(); unknown keys are rejected so a typo in a sweep fails
// loudly instead of silently using a default.
struct RunConfig {
    std::string run_id = "run";
    std::uint64_t seed = 1;
    std::string variant = "hard-learned";  // dense | soft-learned | hard-fixed | hard-learned
    std::uint64_t iterations = 2000;
    std::uint64_t batch_size = 32;
    double learning_rate = 0.1;
    double lr_decay_factor = 0.5;
    std::uint64_t lr_decay_interval = 0;
    double momentum = 0.9;
    double theta_lr_multiplier = 1.0;
    std::uint64_t snapshot_interval = 100;
    std::vector<std::uint64_t> hidden_widths = {64, 64};
    std::uint64_t clusters = 4;
    std::string dataset = "synthetic";  // synthetic | file
    std::string data_train_path;
    std::string data_eval_path;
    std::uint64_t synth_superclasses = 4;
    std::uint64_t synth_subclasses_per = 5;
    std::uint64_t synth_dim = 32;
    std::uint64_t synth_per_class_train = 200;
    std::uint64_t synth_per_class_eval = 200;
    double synth_intra_spread = 1.0;
    double synth_inter_spread = 10.0;
    bool standardize = false;
    std::string output_dir = ".";
};

RunConfig parse_run_config_text(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Applies the BLOCKOUT_SEED environment override, when set.
void apply_seed_override(RunConfig& config);

// The fully materialized configuration as JSON with a fixed key order;
// byte-identical for identical configs.
std::string resolved_config_json(const RunConfig& config);

// Synthetic split parameters exactly as a training run derives them, so
// gen-data files reproduce in-run synthetic datasets.
HierarchicalSpec synthetic_split_spec(const RunConfig& config, bool eval_split);

// Standardizer sidecar CSV: "dim,mean,stddev", one row per feature dimension.
void write_scaler_csv(const std::string& path, const Standardizer& scaler);
Standardizer read_scaler_csv(const std::string& path);

}  // namespace blockout::cli
