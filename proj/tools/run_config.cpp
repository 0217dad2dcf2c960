#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "blockout/run_log.hpp"
#include "blockout/training.hpp"
#include "json.hpp"

namespace blockout::cli {

namespace {

using nlohmann::json;

std::uint64_t get_u64(const json& value, const std::string& key) {
    if (value.is_number_unsigned()) return value.get<std::uint64_t>();
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(value.get<std::int64_t>());
    throw ConfigError("config: \"" + key + "\" must be a non-negative integer");
}

double get_double(const json& value, const std::string& key) {
    if (value.is_number()) return value.get<double>();
    throw ConfigError("config: \"" + key + "\" must be a number");
}

std::string get_string(const json& value, const std::string& key) {
    if (value.is_string()) return value.get<std::string>();
    throw ConfigError("config: \"" + key + "\" must be a string");
}

bool get_bool(const json& value, const std::string& key) {
    if (value.is_boolean()) return value.get<bool>();
    throw ConfigError("config: \"" + key + "\" must be a boolean");
}

std::vector<std::uint64_t> get_u64_array(const json& value, const std::string& key) {
    if (!value.is_array()) throw ConfigError("config: \"" + key + "\" must be an array");
    std::vector<std::uint64_t> out;
    for (const json& item : value) out.push_back(get_u64(item, key));
    return out;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& json_text) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!parsed.is_object()) throw ConfigError("config: top level must be a JSON object");

    RunConfig cfg;
    for (const auto& [key, value] : parsed.items()) {
        if (key == "run_id") cfg.run_id = get_string(value, key);
        else if (key == "seed") cfg.seed = get_u64(value, key);
        else if (key == "variant") cfg.variant = get_string(value, key);
        else if (key == "iterations") cfg.iterations = get_u64(value, key);
        else if (key == "batch_size") cfg.batch_size = get_u64(value, key);
        else if (key == "learning_rate") cfg.learning_rate = get_double(value, key);
        else if (key == "lr_decay_factor") cfg.lr_decay_factor = get_double(value, key);
        else if (key == "lr_decay_interval") cfg.lr_decay_interval = get_u64(value, key);
        else if (key == "momentum") cfg.momentum = get_double(value, key);
        else if (key == "theta_lr_multiplier") cfg.theta_lr_multiplier = get_double(value, key);
        else if (key == "snapshot_interval") cfg.snapshot_interval = get_u64(value, key);
        else if (key == "hidden_widths") cfg.hidden_widths = get_u64_array(value, key);
        else if (key == "clusters") cfg.clusters = get_u64(value, key);
        else if (key == "dataset") cfg.dataset = get_string(value, key);
        else if (key == "data_train_path") cfg.data_train_path = get_string(value, key);
        else if (key == "data_eval_path") cfg.data_eval_path = get_string(value, key);
        else if (key == "synth_superclasses") cfg.synth_superclasses = get_u64(value, key);
        else if (key == "synth_subclasses_per") cfg.synth_subclasses_per = get_u64(value, key);
        else if (key == "synth_dim") cfg.synth_dim = get_u64(value, key);
        else if (key == "synth_per_class_train") cfg.synth_per_class_train = get_u64(value, key);
        else if (key == "synth_per_class_eval") cfg.synth_per_class_eval = get_u64(value, key);
        else if (key == "synth_intra_spread") cfg.synth_intra_spread = get_double(value, key);
        else if (key == "synth_inter_spread") cfg.synth_inter_spread = get_double(value, key);
        else if (key == "standardize") cfg.standardize = get_bool(value, key);
        else if (key == "output_dir") cfg.output_dir = get_string(value, key);
        else throw ConfigError("config: unknown key \"" + key + "\"");
    }

    if (cfg.run_id.empty()) throw ConfigError("config: \"run_id\" must not be empty");
    variant_from_name(cfg.variant);  // validates
    if (cfg.batch_size == 0) throw ConfigError("config: \"batch_size\" must be positive");
    if (cfg.learning_rate < 0.0) throw ConfigError("config: \"learning_rate\" must be >= 0");
    if (cfg.lr_decay_factor <= 0.0) throw ConfigError("config: \"lr_decay_factor\" must be > 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw ConfigError("config: \"momentum\" must lie in [0,1)");
    if (cfg.theta_lr_multiplier < 0.0)
        throw ConfigError("config: \"theta_lr_multiplier\" must be >= 0");
    if (cfg.clusters == 0) throw ConfigError("config: \"clusters\" must be positive");
    for (std::uint64_t w : cfg.hidden_widths)
        if (w == 0) throw ConfigError("config: \"hidden_widths\" entries must be positive");
    if (cfg.dataset != "synthetic" && cfg.dataset != "file")
        throw ConfigError("config: \"dataset\" must be \"synthetic\" or \"file\"");
    if (cfg.dataset == "file" && cfg.data_train_path.empty())
        throw ConfigError("config: dataset \"file\" requires \"data_train_path\"");
    if (cfg.dataset == "synthetic") {
        if (cfg.synth_superclasses == 0 || cfg.synth_subclasses_per == 0 || cfg.synth_dim == 0 ||
            cfg.synth_per_class_train == 0)
            throw ConfigError("config: synthetic counts must be positive");
        if (cfg.synth_intra_spread < 0.0 || cfg.synth_inter_spread < 0.0)
            throw ConfigError("config: synthetic spreads must be >= 0");
    }
    if (cfg.output_dir.empty()) throw ConfigError("config: \"output_dir\" must not be empty");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config_text(text.str());
}

void apply_seed_override(RunConfig& config) {
    const char* env = std::getenv("BLOCKOUT_SEED");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        throw ConfigError(std::string("BLOCKOUT_SEED: not an unsigned integer: \"") + env + "\"");
    config.seed = static_cast<std::uint64_t>(v);
}

std::string resolved_config_json(const RunConfig& cfg) {
    nlohmann::ordered_json out;
    out["run_id"] = cfg.run_id;
    out["seed"] = cfg.seed;
    out["variant"] = cfg.variant;
    out["iterations"] = cfg.iterations;
    out["batch_size"] = cfg.batch_size;
    out["learning_rate"] = cfg.learning_rate;
    out["lr_decay_factor"] = cfg.lr_decay_factor;
    out["lr_decay_interval"] = cfg.lr_decay_interval;
    out["momentum"] = cfg.momentum;
    out["theta_lr_multiplier"] = cfg.theta_lr_multiplier;
    out["snapshot_interval"] = cfg.snapshot_interval;
    out["hidden_widths"] = cfg.hidden_widths;
    out["clusters"] = cfg.clusters;
    out["dataset"] = cfg.dataset;
    out["data_train_path"] = cfg.data_train_path;
    out["data_eval_path"] = cfg.data_eval_path;
    out["synth_superclasses"] = cfg.synth_superclasses;
    out["synth_subclasses_per"] = cfg.synth_subclasses_per;
    out["synth_dim"] = cfg.synth_dim;
    out["synth_per_class_train"] = cfg.synth_per_class_train;
    out["synth_per_class_eval"] = cfg.synth_per_class_eval;
    out["synth_intra_spread"] = cfg.synth_intra_spread;
    out["synth_inter_spread"] = cfg.synth_inter_spread;
    out["standardize"] = cfg.standardize;
    out["output_dir"] = cfg.output_dir;
    return out.dump(2) + "\n";
}

HierarchicalSpec synthetic_split_spec(const RunConfig& cfg, bool eval_split) {
    HierarchicalSpec spec;
    spec.seed = cfg.seed;
    spec.superclasses = cfg.synth_superclasses;
    spec.subclasses_per = cfg.synth_subclasses_per;
    spec.dim = cfg.synth_dim;
    spec.per_class = eval_split ? cfg.synth_per_class_eval : cfg.synth_per_class_train;
    spec.intra_spread = cfg.synth_intra_spread;
    spec.inter_spread = cfg.synth_inter_spread;
    // Same mixture for both splits, independent examples.
    spec.sample_split = eval_split ? 1 : 0;
    return spec;
}

void write_scaler_csv(const std::string& path, const Standardizer& scaler) {
    std::string text = "dim,mean,stddev\n";
    for (std::size_t d = 0; d < scaler.mean.size(); ++d) {
        text += std::to_string(d);
        text += ',';
        text += format_double(scaler.mean[d]);
        text += ',';
        text += format_double(scaler.stddev[d]);
        text += '\n';
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
    out << text;
}

Standardizer read_scaler_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line) || line != "dim,mean,stddev")
        throw ConfigError("scaler: bad header in \"" + path + "\"");
    Standardizer scaler;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ConfigError("scaler: bad row \"" + line + "\"");
        scaler.mean.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
        scaler.stddev.push_back(std::stod(line.substr(c2 + 1)));
    }
    return scaler;
}

}  // namespace blockout::cli
