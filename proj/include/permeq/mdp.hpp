#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace permeq {

// Finite MDP with deterministic mean rewards in [0,1].
struct TabularMDP {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> transitions; // [s][a][s'], rows sum to 1
    std::vector<double> rewards;     // [s][a]

    double p(std::size_t s, std::size_t a, std::size_t s2) const {
        return transitions[(s * num_actions + a) * num_states + s2];
    }
    double& p(std::size_t s, std::size_t a, std::size_t s2) {
        return transitions[(s * num_actions + a) * num_states + s2];
    }
    double r(std::size_t s, std::size_t a) const { return rewards[s * num_actions + a]; }
    double& r(std::size_t s, std::size_t a) { return rewards[s * num_actions + a]; }

    void validate() const;
};

// Every state reaches every other under some policy; equivalent to strong
// connectivity of the union transition graph.
bool is_communicating(const TabularMDP& mdp);

// Partition of the state-action pairs into groups whose next-state
// distributions are relabelings of one another.
struct EquivalenceClassSpec {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> classes;

    // Checks the partition property and that sorted mass vectors agree within
    // each class.
    void validate(const TabularMDP& mdp) const;

    static EquivalenceClassSpec singletons(const TabularMDP& mdp);
};

struct RiverSwimParams {
    double right_up_interior = 0.35;
    double right_stay_interior = 0.6;
    double right_down_interior = 0.05;
    double right_up_start = 0.6;
    double right_stay_end = 0.6;
    double reward_left_start = 0.005;
    double reward_right_end = 1.0;
};

inline constexpr std::uint32_t kActionLeft = 0;
inline constexpr std::uint32_t kActionRight = 1;

// The classic L-state chain: LEFT steps one state left deterministically
// (paying a small reward at the leftmost state), RIGHT drifts upstream
// against the current (paying reward 1 at the rightmost state). The returned
// classes group state-action pairs with relabeled next-state distributions:
// all LEFT pairs, the interior RIGHT pairs, and the two RIGHT boundary pairs
// on their own.
std::pair<TabularMDP, EquivalenceClassSpec> riverswim(std::size_t num_states,
                                                      const RiverSwimParams& params = {});

struct GainResult {
    double gain = 0.0;
    std::vector<double> bias;
    std::size_t iterations = 0;
};

// Long-run average reward of the best policy, by relative value iteration on
// the half-lazy kernel (which leaves the gain of every policy unchanged but
// guarantees aperiodicity). Iterates until the span of the value increments
// drops below tol; bias is anchored at state 0. Throws std::runtime_error
// after 1e6 sweeps without convergence.
GainResult optimal_gain(const TabularMDP& mdp, double tol);

// Per-(s,a,s') probability bounds consumed by optimistic planning.
struct TransitionBounds {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> lo; // [s][a][s']
    std::vector<double> hi;

    double& lower(std::size_t s, std::size_t a, std::size_t s2) {
        return lo[(s * num_actions + a) * num_states + s2];
    }
    double& upper(std::size_t s, std::size_t a, std::size_t s2) {
        return hi[(s * num_actions + a) * num_states + s2];
    }
    double lower(std::size_t s, std::size_t a, std::size_t s2) const {
        return lo[(s * num_actions + a) * num_states + s2];
    }
    double upper(std::size_t s, std::size_t a, std::size_t s2) const {
        return hi[(s * num_actions + a) * num_states + s2];
    }
    // Feasibility of the box-constrained simplex for one pair.
    bool feasible(std::size_t s, std::size_t a) const;

    static TransitionBounds vacuous(std::size_t num_states, std::size_t num_actions);
};

struct EVIResult {
    std::vector<std::uint32_t> policy;
    double gain = 0.0;
    std::vector<double> values;
    std::size_t iterations = 0;
};

// Extended value iteration over the plausible transition set: the inner step
// places mass greedily on high-value successors within the per-element
// bounds, subject to the simplex constraint. Requires every pair to be
// feasible. Same half-lazy iteration and stopping rule as optimal_gain, so
// the reported gain dominates the true optimal gain whenever the true kernel
// lies inside the bounds.
EVIResult extended_value_iteration(const TabularMDP& mdp, const TransitionBounds& bounds,
                                   double tol);

} // namespace permeq
