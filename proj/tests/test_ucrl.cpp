#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "permeq/ucrl.hpp"

using namespace permeq;

TEST_CASE("one-step run") {
    const auto [mdp, classes] = riverswim(6);
    const RegretTrace trace = run_ucrl2b(mdp, 1, 0.05, 3);
    REQUIRE(trace.cumulative_regret.size() == 1);
    // With no data every action looks maximally optimistic; the tie at the
    // start state is broken toward LEFT, whose immediate reward is 0.005.
    CHECK(trace.cumulative_regret[0] ==
          doctest::Approx(trace.reference_gain - 0.005).epsilon(1e-9));
    CHECK(trace.episode_of_step[0] == 0);
    CHECK(trace.fallback_events == 0);
}

TEST_CASE("plausible ranges shrink with data") {
    // Rarely revisited pairs keep clamped full-width ranges, so the maximum
    // is only nonincreasing; the mean range must shrink strictly.
    const auto [mdp, classes] = riverswim(6);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const RegretTrace small = run_ucrl2b(mdp, 1000, 0.05, seed);
        const RegretTrace big = run_ucrl2b(mdp, 100000, 0.05, seed);
        CHECK(big.episodes.back().max_bound_width <= small.episodes.back().max_bound_width);
        CHECK(big.episodes.back().mean_bound_width < small.episodes.back().mean_bound_width);
        // The unrefined path never needs the infeasibility fallback.
        CHECK(big.fallback_events == 0);
        CHECK(big.empty_refined_events == 0);
    }
}

TEST_CASE("regret grows sublinearly") {
    const auto [mdp, classes] = riverswim(6);
    double early_rate = 0.0, late_rate = 0.0;
    const int seeds = 5;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        const RegretTrace trace = run_ucrl2b(mdp, 100000, 0.05, seed);
        early_rate += trace.cumulative_regret[999] / 1000.0;
        late_rate += trace.cumulative_regret[99999] / 100000.0;
    }
    CHECK(late_rate / seeds < 0.5 * early_rate / seeds);
}

TEST_CASE("singleton classes reproduce the unconstrained learner exactly") {
    const auto [mdp, classes] = riverswim(6);
    const EquivalenceClassSpec singletons = EquivalenceClassSpec::singletons(mdp);
    for (std::uint64_t seed : {11ULL, 12ULL}) {
        const RegretTrace plain = run_ucrl2b(mdp, 20000, 0.05, seed);
        const RegretTrace constrained = run_c_ucrl2b(mdp, singletons, 20000, 0.05, seed, 5);
        CHECK(plain.cumulative_regret == constrained.cumulative_regret);
        CHECK(plain.episode_of_step == constrained.episode_of_step);
        CHECK(constrained.empty_refined_events == 0);
    }
}

TEST_CASE("declared classes reduce the probe pair's plausible ranges") {
    const auto [mdp, classes] = riverswim(6);
    const RegretTrace trace = run_c_ucrl2b(mdp, classes, 30000, 0.05, 21, 5);
    int late_episodes = 0, improved = 0;
    for (const EpisodeRecord& episode : trace.episodes) {
        if (episode.start_time <= 10000) continue;
        ++late_episodes;
        if (episode.probe_refined_width <= episode.probe_unrefined_width + 1e-12) ++improved;
    }
    REQUIRE(late_episodes > 0);
    CHECK(static_cast<double>(improved) / late_episodes >= 0.8);
}

TEST_CASE("constrained learner beats the baseline on average (small run)") {
    const auto [mdp, classes] = riverswim(6);
    double plain_total = 0.0, constrained_total = 0.0;
    const int seeds = 5;
    for (std::uint64_t seed = 100; seed < 100 + seeds; ++seed) {
        plain_total += run_ucrl2b(mdp, 30000, 0.05, seed).cumulative_regret.back();
        constrained_total +=
            run_c_ucrl2b(mdp, classes, 30000, 0.05, seed, 5).cumulative_regret.back();
    }
    CHECK(constrained_total < plain_total);
}

TEST_CASE("optimism and matching soundness hold on truth-inside episodes") {
    const auto [mdp, classes] = riverswim(6);
    const double gstar = optimal_gain(mdp, 1e-10).gain;
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        const RegretTrace trace = run_c_ucrl2b(mdp, classes, 50000, 0.05, seed, 5);
        CHECK(trace.true_match_pruned == 0);
        CHECK(trace.episodes_truth_inside > 0);
        for (const EpisodeRecord& episode : trace.episodes)
            if (episode.truth_in_consumed_bounds)
                CHECK(episode.optimistic_gain >= gstar - episode.planning_tolerance - 1e-9);
    }
}

TEST_CASE("traces are deterministic in the seed") {
    const auto [mdp, classes] = riverswim(6);
    const RegretTrace a = run_c_ucrl2b(mdp, classes, 5000, 0.05, 9, 5);
    const RegretTrace b = run_c_ucrl2b(mdp, classes, 5000, 0.05, 9, 5);
    CHECK(a.cumulative_regret == b.cumulative_regret);
    CHECK(a.episode_of_step == b.episode_of_step);
    const RegretTrace c = run_c_ucrl2b(mdp, classes, 5000, 0.05, 10, 5);
    CHECK(a.cumulative_regret != c.cumulative_regret);
}
