#include "runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "blockout/checkpoint.hpp"
#include "blockout/run_log.hpp"

namespace blockout::cli {

PreparedData prepare_data(const RunConfig& cfg) {
    PreparedData data;
    if (cfg.dataset == "synthetic") {
        data.train = generate_hierarchical(synthetic_split_spec(cfg, /*eval_split=*/false));
        if (cfg.synth_per_class_eval > 0)
            data.eval = generate_hierarchical(synthetic_split_spec(cfg, /*eval_split=*/true));
    } else {
        data.train = load_binary(cfg.data_train_path);
        if (!cfg.data_eval_path.empty()) data.eval = load_binary(cfg.data_eval_path);
    }
    if (cfg.standardize) {
        data.scaler = fit_standardizer(data.train);
        data.train = standardized(data.train, *data.scaler);
        if (data.eval) data.eval = standardized(*data.eval, *data.scaler);
    }
    return data;
}

Network build_network(const RunConfig& cfg, std::size_t input_dim, std::size_t classes) {
    RngStream rng = RngStream(cfg.seed).derive(3);
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    for (std::uint64_t w : cfg.hidden_widths) dims.push_back(static_cast<std::size_t>(w));
    dims.push_back(classes);
    const std::size_t transforms = dims.size() - 1;
    const std::size_t first_blockout = transforms >= 2 ? transforms - 2 : 0;
    const bool use_blockout = cfg.variant != "dense";

    Network net;
    for (std::size_t t = 0; t < transforms; ++t) {
        if (use_blockout && t >= first_blockout)
            net.add_blockout(dims[t], dims[t + 1], static_cast<std::size_t>(cfg.clusters), rng);
        else
            net.add_dense(dims[t], dims[t + 1], rng);
        if (t + 1 < transforms) net.add_relu();
    }
    net.add_softmax_loss(classes);
    net.finalize();
    return net;
}

RunResult execute_training_run(const RunConfig& cfg) {
    PreparedData data = prepare_data(cfg);

    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.lr_decay_factor = cfg.lr_decay_factor;
    tc.lr_decay_interval = cfg.lr_decay_interval;
    tc.momentum = cfg.momentum;
    tc.batch_size = static_cast<std::size_t>(cfg.batch_size);
    tc.iterations = cfg.iterations;
    tc.seed = cfg.seed;
    tc.theta_lr_multiplier = cfg.theta_lr_multiplier;
    tc.snapshot_interval = cfg.snapshot_interval;
    tc.variant = variant_from_name(cfg.variant);
    tc.validate(data.train.size());

    Network net = build_network(cfg, data.train.dim(), data.train.num_classes);
    TrainingLog log;
    run_training(net, data.train, data.eval ? &*data.eval : nullptr, tc, log);

    RunResult result;
    result.train_accuracy = evaluate(net, data.train);
    result.eval_accuracy =
        data.eval ? evaluate(net, *data.eval) : std::numeric_limits<double>::quiet_NaN();

    std::filesystem::create_directories(cfg.output_dir);
    const std::string base = cfg.output_dir + "/" + cfg.run_id;
    result.config_path = base + ".config.json";
    result.checkpoint_path = base + ".checkpoint.blko";
    result.log_path = base + ".log.csv";
    result.snapshots_path = base + ".snapshots.bin";

    {
        std::ofstream out(result.config_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open \"" + result.config_path + "\" for writing");
        out << resolved_config_json(cfg);
    }
    save_checkpoint(net, result.checkpoint_path);
    write_log_csv(result.log_path, log);
    write_snapshots(result.snapshots_path, log.snapshots);
    if (data.scaler) write_scaler_csv(base + ".scaler.csv", *data.scaler);
    return result;
}

}  // namespace blockout::cli
