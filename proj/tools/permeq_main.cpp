#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "permeq/config.hpp"
#include "permeq/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::int64_t reps = 0;
    bool reps_given = false;
};

void add_subcommand(CLI::App& app, const std::string& name, const std::string& description,
                    CliOptions& opts, std::string& selected) {
    CLI::App* cmd = app.add_subcommand(name, description);
    cmd->add_option("--config", opts.config_path, "experiment configuration (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "base seed override")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--reps", opts.reps, "replication count override")
        ->each([&opts](const std::string&) { opts.reps_given = true; });
    cmd->callback([&selected, name] { selected = name; });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"confidence-set refinement under permutation equivalence"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string selected;
    add_subcommand(app, "refine", "one refinement run, interval tables as CSV", opts, selected);
    add_subcommand(app, "coverage", "Monte Carlo coverage of initial and refined sets", opts,
                   selected);
    add_subcommand(app, "ratio-sweep", "initial/refined width ratios across clique caps", opts,
                   selected);
    add_subcommand(app, "rate-sweep", "refined widths against growing sample sizes", opts,
                   selected);
    add_subcommand(app, "rl", "UCRL2B versus C-UCRL2B regret on RiverSwim", opts, selected);
    CLI11_PARSE(app, argc, argv);

    permeq::ExperimentConfig cfg;
    try {
        cfg = permeq::load_config(opts.config_path);
        if (permeq::to_string(cfg.kind) != selected)
            throw permeq::ConfigError("config kind '" + std::string(permeq::to_string(cfg.kind)) +
                                      "' does not match subcommand '" + selected + "'");
        if (opts.seed_given) cfg.seed = opts.seed;
        if (opts.reps_given) {
            if (opts.reps < 1) throw permeq::ConfigError("--reps must be >= 1");
            cfg.replications = opts.reps;
        }
        if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
        if (cfg.out_dir.empty())
            throw permeq::ConfigError("no output directory (--out or config.out_dir)");
    } catch (const permeq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        permeq::run_experiment(cfg, cfg.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
