#pragma once

#include <string>

#include "permeq/config.hpp"
#include "permeq/equivalence.hpp"

namespace permeq {

// Materialize the configured instance, drawing permutations from the seed
// when they were requested as "random".
ProblemInstance build_instance(const InstanceConfig& cfg, std::uint64_t seed);

// Each command writes its CSV outputs under out_dir (created if missing) and
// is deterministic in (config, seed): reruns produce byte-identical files.
void cmd_refine(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_coverage(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_ratio_sweep(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_rate_sweep(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_rl(const ExperimentConfig& cfg, const std::string& out_dir);

void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Shared by the ratio command and the acceptance suite: per-instance
// min/mean/max of the initial-to-refined width ratios (cells with empty
// refined sets are skipped and counted separately).
struct RatioStats {
    double min_ratio = 0.0;
    double mean_ratio = 0.0;
    double max_ratio = 0.0;
    std::size_t skipped_cells = 0;
    std::size_t cells = 0;
};

RatioStats ratio_stats(const ConfidenceTable& table, const RefinedTable& refined);

} // namespace permeq
