#include "permeq/ucrl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "permeq/equivalence.hpp"
#include "permeq/rng.hpp"
#include "permeq/stats.hpp"

namespace permeq {

namespace {

struct Counts {
    std::size_t S = 0, A = 0;
    std::vector<std::int64_t> visits;      // [s][a]
    std::vector<std::int64_t> transitions; // [s][a][s']

    std::int64_t& n(std::size_t s, std::size_t a) { return visits[s * A + a]; }
    std::int64_t n(std::size_t s, std::size_t a) const { return visits[s * A + a]; }
    std::int64_t& nsas(std::size_t s, std::size_t a, std::size_t s2) {
        return transitions[(s * A + a) * S + s2];
    }
    std::int64_t nsas(std::size_t s, std::size_t a, std::size_t s2) const {
        return transitions[(s * A + a) * S + s2];
    }
};

CIMethod agent_method(std::size_t num_states) {
    CIMethod m;
    m.family = CIFamily::EmpiricalBernstein;
    m.alphabet_size = static_cast<int>(num_states);
    return m;
}

// Unrefined plausible ranges: per-element empirical-Bernstein intervals with
// the per-pair confidence budget, vacuous for unvisited pairs.
TransitionBounds unrefined_bounds(const TabularMDP& mdp, const Counts& counts,
                                  double pair_delta) {
    TransitionBounds bounds = TransitionBounds::vacuous(mdp.num_states, mdp.num_actions);
    const CIMethod method = agent_method(mdp.num_states);
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        for (std::size_t a = 0; a < mdp.num_actions; ++a) {
            const std::int64_t n = counts.n(s, a);
            if (n == 0) continue;
            for (std::size_t s2 = 0; s2 < mdp.num_states; ++s2) {
                const Interval ci =
                    confidence_interval({counts.nsas(s, a, s2), n}, pair_delta, method);
                bounds.lower(s, a, s2) = ci.lo();
                bounds.upper(s, a, s2) = ci.hi();
            }
        }
    }
    return bounds;
}

// Refine each class through the matching pipeline and overwrite the bounds of
// its visited members with the hulls of the refined sets. When check_soundness
// is set (episodes whose unrefined ranges all held the truth), counts how
// often a true support match was pruned away; that number must stay zero.
void apply_class_refinement(const TabularMDP& mdp, const EquivalenceClassSpec& classes,
                            const Counts& counts, double pair_delta,
                            std::int64_t prune_clique_cap, TransitionBounds& bounds,
                            std::uint64_t& empty_refined_events, bool check_soundness,
                            std::uint64_t& true_match_pruned) {
    const CIMethod method = agent_method(mdp.num_states);
    for (const auto& group : classes.classes) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> members;
        for (const auto& pair : group)
            if (counts.n(pair.first, pair.second) >= 1) members.push_back(pair);
        if (members.size() < 2) continue;

        SampleTable samples;
        samples.counts.resize(members.size());
        ConfidenceTable table;
        table.delta = pair_delta;
        table.method = method;
        table.cells.resize(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto [s, a] = members[i];
            samples.counts[i].resize(mdp.num_states);
            table.cells[i].resize(mdp.num_states);
            for (std::size_t s2 = 0; s2 < mdp.num_states; ++s2) {
                samples.counts[i][s2] = counts.nsas(s, a, s2);
                table.cells[i][s2] =
                    Interval::closed(bounds.lower(s, a, s2), bounds.upper(s, a, s2));
            }
        }

        const MatchingTable pruned =
            prune_matchings(initial_matchings(table), prune_clique_cap, nullptr);
        const RefinedTable refined = refine(pruned, table, samples);

        if (check_soundness) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                const auto [si, ai] = members[i];
                for (std::size_t j = 0; j < members.size(); ++j) {
                    if (j == i) continue;
                    const auto [sj, aj] = members[j];
                    for (std::uint32_t x = 0; x < mdp.num_states; ++x) {
                        const double mass = mdp.p(si, ai, x);
                        if (mass <= 0.0) continue;
                        bool survives = false;
                        for (std::uint32_t xp : pruned.at(i, j, x))
                            if (std::abs(mdp.p(sj, aj, xp) - mass) < 1e-12) survives = true;
                        if (!survives) ++true_match_pruned;
                    }
                }
            }
        }

        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto [s, a] = members[i];
            for (std::size_t s2 = 0; s2 < mdp.num_states; ++s2) {
                if (refined.cells[i][s2].is_empty()) {
                    ++empty_refined_events;
                    continue; // keep the unrefined entry
                }
                const Interval hull = refined.cells[i][s2].hull();
                bounds.lower(s, a, s2) = hull.lo();
                bounds.upper(s, a, s2) = hull.hi();
            }
        }
    }
}

bool bounds_contain_kernel(const TransitionBounds& bounds, const TabularMDP& mdp) {
    for (std::size_t s = 0; s < mdp.num_states; ++s)
        for (std::size_t a = 0; a < mdp.num_actions; ++a)
            for (std::size_t s2 = 0; s2 < mdp.num_states; ++s2) {
                const double p = mdp.p(s, a, s2);
                if (p < bounds.lower(s, a, s2) || p > bounds.upper(s, a, s2)) return false;
            }
    return true;
}

double pair_width_sum(const TransitionBounds& bounds, std::size_t s, std::size_t a) {
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < bounds.num_states; ++s2)
        total += bounds.upper(s, a, s2) - bounds.lower(s, a, s2);
    return total;
}

std::pair<double, double> bound_width_stats(const TransitionBounds& bounds) {
    double worst = 0.0;
    double total = 0.0;
    std::size_t cells = 0;
    for (std::size_t s = 0; s < bounds.num_states; ++s)
        for (std::size_t a = 0; a < bounds.num_actions; ++a)
            for (std::size_t s2 = 0; s2 < bounds.num_states; ++s2) {
                const double w = bounds.upper(s, a, s2) - bounds.lower(s, a, s2);
                worst = std::max(worst, w);
                total += w;
                ++cells;
            }
    return {worst, total / static_cast<double>(cells)};
}

// Interior state with the fewest RIGHT visits; the pair the refinement is
// expected to help most.
std::size_t probe_state(const TabularMDP& mdp, const Counts& counts) {
    std::size_t best = 1;
    for (std::size_t s = 2; s + 1 < mdp.num_states; ++s)
        if (counts.n(s, kActionRight) < counts.n(best, kActionRight)) best = s;
    return best;
}

RegretTrace run_agent(const TabularMDP& mdp, const EquivalenceClassSpec* classes,
                      std::int64_t horizon, double delta, std::uint64_t seed,
                      std::int64_t prune_clique_cap) {
    mdp.validate();
    if (horizon < 1) throw std::invalid_argument("run_agent: horizon must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("run_agent: delta not in (0,1)");
    const std::size_t S = mdp.num_states;
    const std::size_t A = mdp.num_actions;
    const double pair_delta = delta / static_cast<double>(S * A);
    const double gain = optimal_gain(mdp, 1e-10).gain;

    RegretTrace trace;
    trace.seed = seed;
    trace.reference_gain = gain;
    trace.cumulative_regret.resize(horizon);
    trace.episode_of_step.resize(horizon);

    Counts counts;
    counts.S = S;
    counts.A = A;
    counts.visits.assign(S * A, 0);
    counts.transitions.assign(S * A * S, 0);
    std::vector<std::int64_t> episode_visits(S * A, 0);
    std::vector<std::int64_t> episode_start_visits(S * A, 0);

    // Next-state samplers per pair.
    std::vector<std::vector<double>> cumulative(S * A, std::vector<double>(S, 0.0));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            double acc = 0.0;
            for (std::size_t s2 = 0; s2 < S; ++s2) {
                acc += mdp.p(s, a, s2);
                cumulative[s * A + a][s2] = acc;
            }
            cumulative[s * A + a][S - 1] = 1.0;
        }

    SplitMix64 rng(seed);
    std::vector<std::uint32_t> policy(S, 0);
    std::size_t state = 0;
    double total_reward = 0.0;
    std::uint32_t episode = 0;
    bool need_replan = true;

    for (std::int64_t t = 1; t <= horizon; ++t) {
        if (!need_replan) {
            const std::size_t idx = state * A + policy[state];
            if (episode_visits[idx] >= std::max<std::int64_t>(1, episode_start_visits[idx]))
                need_replan = true;
        }
        if (need_replan) {
            need_replan = false;
            if (t > 1) ++episode;
            episode_start_visits = counts.visits;
            std::fill(episode_visits.begin(), episode_visits.end(), 0);

            const TransitionBounds unrefined = unrefined_bounds(mdp, counts, pair_delta);
            const bool truth_inside = bounds_contain_kernel(unrefined, mdp);
            if (truth_inside) ++trace.episodes_truth_inside;
            TransitionBounds bounds = unrefined;
            if (classes)
                apply_class_refinement(mdp, *classes, counts, pair_delta, prune_clique_cap,
                                       bounds, trace.empty_refined_events, truth_inside,
                                       trace.true_match_pruned);
            for (std::size_t s = 0; s < S; ++s)
                for (std::size_t a = 0; a < A; ++a)
                    if (!bounds.feasible(s, a)) {
                        for (std::size_t s2 = 0; s2 < S; ++s2) {
                            bounds.lower(s, a, s2) = unrefined.lower(s, a, s2);
                            bounds.upper(s, a, s2) = unrefined.upper(s, a, s2);
                        }
                        ++trace.fallback_events;
                    }

            const double tol = 1.0 / std::sqrt(static_cast<double>(t));
            const EVIResult plan = extended_value_iteration(mdp, bounds, tol);
            policy = plan.policy;

            EpisodeRecord record;
            record.start_time = t;
            const auto [worst_width, mean_width] = bound_width_stats(bounds);
            record.max_bound_width = worst_width;
            record.mean_bound_width = mean_width;
            const std::size_t probe = probe_state(mdp, counts);
            record.probe_refined_width = pair_width_sum(bounds, probe, kActionRight);
            record.probe_unrefined_width = pair_width_sum(unrefined, probe, kActionRight);
            record.optimistic_gain = plan.gain;
            record.planning_tolerance = tol;
            record.truth_in_consumed_bounds = bounds_contain_kernel(bounds, mdp);
            trace.episodes.push_back(record);
        }

        const std::uint32_t action = policy[state];
        total_reward += mdp.r(state, action);
        const std::size_t next_state = discrete_draw(cumulative[state * A + action], rng);
        ++episode_visits[state * A + action];
        ++counts.n(state, action);
        ++counts.nsas(state, action, next_state);
        trace.cumulative_regret[t - 1] = static_cast<double>(t) * gain - total_reward;
        trace.episode_of_step[t - 1] = episode;
        state = next_state;
    }
    return trace;
}

} // namespace

RegretTrace run_ucrl2b(const TabularMDP& mdp, std::int64_t horizon, double delta,
                       std::uint64_t seed) {
    return run_agent(mdp, nullptr, horizon, delta, seed, 1);
}

RegretTrace run_c_ucrl2b(const TabularMDP& mdp, const EquivalenceClassSpec& classes,
                         std::int64_t horizon, double delta, std::uint64_t seed,
                         std::int64_t prune_clique_cap) {
    classes.validate(mdp);
    return run_agent(mdp, &classes, horizon, delta, seed, prune_clique_cap);
}

} // namespace permeq
