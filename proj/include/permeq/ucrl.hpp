#pragma once

#include <cstdint>
#include <vector>

#include "permeq/mdp.hpp"

namespace permeq {

struct EpisodeRecord {
    std::int64_t start_time = 0;
    double max_bound_width = 0.0;      // widest (s,a,s') plausible range this episode
    double mean_bound_width = 0.0;     // mean (s,a,s') plausible range this episode
    double probe_refined_width = 0.0;  // summed next-state range at the probe pair
    double probe_unrefined_width = 0.0;
    double optimistic_gain = 0.0;
    double planning_tolerance = 0.0;
    bool truth_in_consumed_bounds = false; // true kernel inside the planner's ranges
};

// Per-step cumulative regret against the gain-optimal policy, with episode
// bookkeeping and the diagnostics the comparison experiments read.
struct RegretTrace {
    std::uint64_t seed = 0;
    double reference_gain = 0.0;
    std::vector<double> cumulative_regret;      // length T, regret after step t
    std::vector<std::uint32_t> episode_of_step; // length T
    std::vector<EpisodeRecord> episodes;
    std::uint64_t fallback_events = 0;      // infeasible refined pair reverted
    std::uint64_t empty_refined_events = 0; // empty refined cell reverted
    // Episodes whose unrefined ranges all contained the true kernel, and the
    // number of such episodes on which some class pruned away a true support
    // match (must stay zero: the matching soundness property in the loop).
    std::uint64_t episodes_truth_inside = 0;
    std::uint64_t true_match_pruned = 0;
};

// Optimistic average-reward learner: episodes end when some state-action
// visit count doubles, plausible transitions come from per-element
// empirical-Bernstein intervals at confidence delta/(S*A), planning is
// extended value iteration to accuracy 1/sqrt(episode start time). Rewards
// are treated as known. Deterministic given the seed.
RegretTrace run_ucrl2b(const TabularMDP& mdp, std::int64_t horizon, double delta,
                       std::uint64_t seed);

// Same loop, but at each episode start the per-pair confidence tables of
// every declared equivalence class are refined (matchings, pruning with the
// given clique cap, then pooling/intersection) and planning consumes the
// hulls of the refined sets. Empty refined cells and infeasible pairs fall
// back to the unrefined intervals and are counted.
RegretTrace run_c_ucrl2b(const TabularMDP& mdp, const EquivalenceClassSpec& classes,
                         std::int64_t horizon, double delta, std::uint64_t seed,
                         std::int64_t prune_clique_cap);

} // namespace permeq
