#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blockout/analysis.hpp"
#include "blockout/checkpoint.hpp"
#include "blockout/run_log.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using namespace blockout;
using namespace blockout::cli;

namespace {

int cmd_train(const std::string& config_path) {
    RunConfig cfg = load_run_config(config_path);
    apply_seed_override(cfg);
    std::cout << resolved_config_json(cfg);
    const RunResult result = execute_training_run(cfg);
    std::cout << "checkpoint: " << result.checkpoint_path << "\n"
              << "log: " << result.log_path << "\n"
              << "snapshots: " << result.snapshots_path << "\n"
              << "train_accuracy: " << format_double(result.train_accuracy) << "\n";
    if (!std::isnan(result.eval_accuracy))
        std::cout << "eval_accuracy: " << format_double(result.eval_accuracy) << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& scaler_path) {
    Network net = load_checkpoint(checkpoint_path);
    Dataset data = load_binary(data_path);
    if (!scaler_path.empty()) data = standardized(data, read_scaler_csv(scaler_path));
    std::cout << format_double(evaluate(net, data)) << "\n";
    return 0;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_path, bool eval_split) {
    RunConfig cfg = load_run_config(config_path);
    apply_seed_override(cfg);
    const Dataset data = generate_hierarchical(synthetic_split_spec(cfg, eval_split));
    save_binary(data, out_path);
    std::cout << out_path << ": " << data.size() << " examples, dim " << data.dim() << ", "
              << data.num_classes << " classes\n";
    return 0;
}

std::string find_run_id(const std::string& run_dir) {
    constexpr const char* suffix = ".config.json";
    std::vector<std::string> found;
    if (!fs::is_directory(run_dir))
        throw ConfigError("analyze: \"" + run_dir + "\" is not a directory");
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > std::strlen(suffix) &&
            name.compare(name.size() - std::strlen(suffix), std::string::npos, suffix) == 0)
            found.push_back(name.substr(0, name.size() - std::strlen(suffix)));
    }
    if (found.empty())
        throw ConfigError("analyze: no <run-id>.config.json in \"" + run_dir + "\"");
    if (found.size() > 1) {
        std::string msg = "analyze: multiple runs in \"" + run_dir + "\":";
        for (const std::string& id : found) msg += " " + id;
        throw ConfigError(msg);
    }
    return found.front();
}

int cmd_analyze(const std::string& run_dir, const std::string& which, std::size_t bins) {
    const std::string run_id = find_run_id(run_dir);
    const std::string log_path = run_dir + "/" + run_id + ".log.csv";
    const std::string snapshots_path = run_dir + "/" + run_id + ".snapshots.bin";

    if (which == "curve") {
        if (!fs::exists(log_path))
            throw ConfigError("analyze: missing training log, expected \"" + log_path + "\"");
        write_curve_csv(run_dir, run_id, read_log_csv(log_path));
        std::cout << run_dir << "/" << run_id << ".curve.csv\n";
        return 0;
    }

    if (!fs::exists(snapshots_path))
        throw ConfigError("analyze: missing snapshots, expected \"" + snapshots_path + "\"");
    const std::vector<ProbabilitySnapshot> snapshots = read_snapshots(snapshots_path);
    if (snapshots.empty())
        throw ConfigError("analyze: \"" + snapshots_path + "\" holds no snapshots");

    if (which == "hist") {
        write_histogram_csvs(run_dir, run_id, snapshots, bins);
    } else if (which == "pca") {
        write_pca_csvs(run_dir, run_id, snapshots);
    } else if (which == "clusters") {
        write_cluster_csvs(run_dir, run_id, snapshots);
    } else {
        throw ConfigError("analyze: unknown analysis \"" + which + "\"");
    }
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(run_id + "." + which + ".", 0) == 0) std::cout << run_dir << "/" << name << "\n";
    }
    return 0;
}

int cmd_ablate(const std::string& config_path) {
    RunConfig base = load_run_config(config_path);
    apply_seed_override(base);
    const std::vector<std::string> variants = {"soft-learned", "hard-fixed", "hard-learned"};
    std::string table = "variant,train_acc,eval_acc\n";
    for (const std::string& variant : variants) {
        RunConfig cfg = base;
        cfg.variant = variant;
        cfg.run_id = base.run_id + "-" + variant;
        const RunResult result = execute_training_run(cfg);
        table += variant + "," + format_double(result.train_accuracy) + "," +
                 format_double(result.eval_accuracy) + "\n";
    }
    fs::create_directories(base.output_dir);
    const std::string table_path = base.output_dir + "/" + base.run_id + ".ablation.csv";
    {
        std::ofstream out(table_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open \"" + table_path + "\" for writing");
        out << table;
    }
    std::cout << table << "table: " << table_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blockout: stochastic block-structured regularization with learned cluster "
                 "probabilities, on dense layer stacks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint_path;
    std::string data_path;
    std::string scaler_path;
    std::string out_path;
    std::string run_dir;
    std::string which;
    std::string split = "train";
    std::size_t bins = 20;

    CLI::App* train = app.add_subcommand("train", "Train a network from a JSON config");
    train->add_option("--config", config_path, "Path to the run config")->required();

    CLI::App* eval = app.add_subcommand("eval", "Score a checkpoint on a dataset");
    eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
    eval->add_option("--data", data_path, "Dataset file (BODS)")->required();
    eval->add_option("--scaler", scaler_path, "Standardizer sidecar from the training run");

    CLI::App* analyze = app.add_subcommand("analyze", "Emit analysis CSVs for a finished run");
    analyze->add_option("--run", run_dir, "Run output directory")->required();
    analyze->add_option("--which", which, "hist | pca | clusters | curve")->required();
    analyze->add_option("--bins", bins, "Histogram bin count")->check(CLI::Range(std::size_t{2}, std::size_t{4096}));

    CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic dataset file");
    gen->add_option("--config", config_path, "Path to the run config")->required();
    gen->add_option("--out", out_path, "Output dataset path")->required();
    gen->add_option("--split", split, "train | eval (which in-run split to reproduce)")
        ->check(CLI::IsMember({"train", "eval"}));

    CLI::App* ablate = app.add_subcommand(
        "ablate", "Train the soft-learned / hard-fixed / hard-learned trio and tabulate accuracy");
    ablate->add_option("--config", config_path, "Path to the run config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(config_path);
        if (eval->parsed()) return cmd_eval(checkpoint_path, data_path, scaler_path);
        if (analyze->parsed()) return cmd_analyze(run_dir, which, bins);
        if (gen->parsed()) return cmd_gen_data(config_path, out_path, split == "eval");
        if (ablate->parsed()) return cmd_ablate(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
