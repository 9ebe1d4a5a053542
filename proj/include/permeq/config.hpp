#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "permeq/stats.hpp"

namespace permeq {

// Raised for malformed or inconsistent experiment configuration; the CLI maps
// it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Refine, Coverage, RatioSweep, RateSweep, Rl };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct InstanceConfig {
    std::vector<double> q;
    // Explicit index lists, or empty with random_permutations=true.
    std::vector<std::vector<std::uint32_t>> permutations;
    bool random_permutations = false;
    std::vector<std::int64_t> sample_sizes;
};

struct RatioConfig {
    int alphabet_size = 10;
    int support_size = 6;
    int family_size = 5;
    std::int64_t n_primary = 200;
    std::vector<std::int64_t> clique_caps{1, 3, 5, 10};
    std::vector<std::int64_t> n_primary_values;
};

struct RateConfig {
    std::vector<double> q;
    int family_size = 5;
    std::vector<std::int64_t> size_grid;
};

struct RlConfig {
    int num_states = 6;
    std::int64_t horizon = 100000;
    bool run_ucrl2b = true;
    bool run_c_ucrl2b = true;
    std::int64_t trace_stride = 100;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Refine;
    double delta = 0.1;
    CIMethod method;
    std::int64_t prune_clique_cap = 5;
    std::uint64_t seed = 1;
    std::int64_t replications = 1;
    std::string out_dir;

    std::optional<InstanceConfig> instance;
    std::optional<RatioConfig> ratio;
    std::optional<RateConfig> rate;
    std::optional<RlConfig> rl;
};

// Parses and validates the JSON configuration document. Unknown keys are
// rejected; kind-specific sections are required for their kind.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

} // namespace permeq
