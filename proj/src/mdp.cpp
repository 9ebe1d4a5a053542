#include "permeq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace permeq {

namespace {

constexpr std::size_t kMaxSweeps = 1000000;

double span(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

} // namespace

void TabularMDP::validate() const {
    if (num_states == 0 || num_actions == 0)
        throw std::invalid_argument("TabularMDP: empty state or action space");
    if (transitions.size() != num_states * num_actions * num_states ||
        rewards.size() != num_states * num_actions)
        throw std::invalid_argument("TabularMDP: tensor shapes inconsistent");
    for (std::size_t s = 0; s < num_states; ++s) {
        for (std::size_t a = 0; a < num_actions; ++a) {
            double total = 0.0;
            for (std::size_t s2 = 0; s2 < num_states; ++s2) {
                const double v = p(s, a, s2);
                if (v < 0.0) throw std::invalid_argument("TabularMDP: negative probability");
                total += v;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw std::invalid_argument("TabularMDP: transition row does not sum to 1");
            if (r(s, a) < 0.0 || r(s, a) > 1.0)
                throw std::invalid_argument("TabularMDP: rewards must lie in [0,1]");
        }
    }
}

namespace {

std::vector<char> reachable_from(const TabularMDP& mdp, std::size_t start, bool reversed) {
    std::vector<char> seen(mdp.num_states, 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        const std::size_t s = stack.back();
        stack.pop_back();
        for (std::size_t other = 0; other < mdp.num_states; ++other) {
            if (seen[other]) continue;
            bool edge = false;
            for (std::size_t a = 0; a < mdp.num_actions && !edge; ++a)
                edge = reversed ? mdp.p(other, a, s) > 0.0 : mdp.p(s, a, other) > 0.0;
            if (edge) {
                seen[other] = 1;
                stack.push_back(other);
            }
        }
    }
    return seen;
}

} // namespace

bool is_communicating(const TabularMDP& mdp) {
    const std::vector<char> forward = reachable_from(mdp, 0, false);
    const std::vector<char> backward = reachable_from(mdp, 0, true);
    for (std::size_t s = 0; s < mdp.num_states; ++s)
        if (!forward[s] || !backward[s]) return false;
    return true;
}

void EquivalenceClassSpec::validate(const TabularMDP& mdp) const {
    std::vector<char> seen(mdp.num_states * mdp.num_actions, 0);
    for (const auto& group : classes) {
        if (group.empty()) throw std::invalid_argument("EquivalenceClassSpec: empty class");
        std::vector<double> reference;
        for (const auto& [s, a] : group) {
            if (s >= mdp.num_states || a >= mdp.num_actions)
                throw std::invalid_argument("EquivalenceClassSpec: pair out of range");
            if (seen[s * mdp.num_actions + a])
                throw std::invalid_argument("EquivalenceClassSpec: pair appears twice");
            seen[s * mdp.num_actions + a] = 1;
            std::vector<double> masses(mdp.num_states);
            for (std::size_t s2 = 0; s2 < mdp.num_states; ++s2) masses[s2] = mdp.p(s, a, s2);
            std::sort(masses.begin(), masses.end());
            if (reference.empty()) {
                reference = masses;
            } else {
                for (std::size_t i = 0; i < masses.size(); ++i)
                    if (std::abs(masses[i] - reference[i]) > 1e-12)
                        throw std::invalid_argument(
                            "EquivalenceClassSpec: class members are not relabelings of one "
                            "distribution");
            }
        }
    }
    for (char c : seen)
        if (!c) throw std::invalid_argument("EquivalenceClassSpec: partition misses a pair");
}

EquivalenceClassSpec EquivalenceClassSpec::singletons(const TabularMDP& mdp) {
    EquivalenceClassSpec spec;
    for (std::uint32_t s = 0; s < mdp.num_states; ++s)
        for (std::uint32_t a = 0; a < mdp.num_actions; ++a)
            spec.classes.push_back({{s, a}});
    return spec;
}

std::pair<TabularMDP, EquivalenceClassSpec> riverswim(std::size_t num_states,
                                                      const RiverSwimParams& params) {
    if (num_states < 3) throw std::invalid_argument("riverswim: need at least 3 states");
    const double interior_sum =
        params.right_up_interior + params.right_stay_interior + params.right_down_interior;
    if (std::abs(interior_sum - 1.0) > 1e-12 || params.right_up_start > 1.0 ||
        params.right_stay_end > 1.0)
        throw std::invalid_argument("riverswim: transition parameters do not form distributions");

    TabularMDP mdp;
    mdp.num_states = num_states;
    mdp.num_actions = 2;
    mdp.transitions.assign(num_states * 2 * num_states, 0.0);
    mdp.rewards.assign(num_states * 2, 0.0);

    const std::size_t last = num_states - 1;
    for (std::size_t s = 0; s < num_states; ++s) {
        mdp.p(s, kActionLeft, s == 0 ? 0 : s - 1) = 1.0;
        if (s == 0) {
            mdp.p(s, kActionRight, 1) = params.right_up_start;
            mdp.p(s, kActionRight, 0) = 1.0 - params.right_up_start;
        } else if (s == last) {
            mdp.p(s, kActionRight, last) = params.right_stay_end;
            mdp.p(s, kActionRight, last - 1) = 1.0 - params.right_stay_end;
        } else {
            mdp.p(s, kActionRight, s + 1) = params.right_up_interior;
            mdp.p(s, kActionRight, s) = params.right_stay_interior;
            mdp.p(s, kActionRight, s - 1) = params.right_down_interior;
        }
    }
    mdp.r(0, kActionLeft) = params.reward_left_start;
    mdp.r(last, kActionRight) = params.reward_right_end;
    mdp.validate();
    if (!is_communicating(mdp))
        throw std::invalid_argument("riverswim: parameters make the chain non-communicating");

    EquivalenceClassSpec classes;
    classes.classes.resize(4);
    for (std::uint32_t s = 0; s < num_states; ++s) classes.classes[0].push_back({s, kActionLeft});
    for (std::uint32_t s = 1; s + 1 < num_states; ++s)
        classes.classes[1].push_back({s, kActionRight});
    classes.classes[2].push_back({0, kActionRight});
    classes.classes[3].push_back({static_cast<std::uint32_t>(last), kActionRight});
    classes.validate(mdp);
    return {mdp, classes};
}

GainResult optimal_gain(const TabularMDP& mdp, double tol) {
    mdp.validate();
    const std::size_t S = mdp.num_states;
    const std::size_t A = mdp.num_actions;
    std::vector<double> u(S, 0.0), next(S, 0.0), delta(S, 0.0);

    for (std::size_t sweep = 1; sweep <= kMaxSweeps; ++sweep) {
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < A; ++a) {
                double value = mdp.r(s, a);
                for (std::size_t s2 = 0; s2 < S; ++s2) value += 0.5 * mdp.p(s, a, s2) * u[s2];
                best = std::max(best, value + 0.5 * u[s]);
            }
            next[s] = best;
        }
        for (std::size_t s = 0; s < S; ++s) delta[s] = next[s] - u[s];
        const double residual_span = span(delta);
        const double anchor = next[0];
        for (std::size_t s = 0; s < S; ++s) u[s] = next[s] - anchor;
        if (residual_span < tol) {
            const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
            GainResult out;
            out.gain = 0.5 * (*lo + *hi);
            out.iterations = sweep;
            // The half-lazy kernel doubles the bias scale; undo it.
            out.bias.resize(S);
            for (std::size_t s = 0; s < S; ++s) out.bias[s] = 0.5 * u[s];
            return out;
        }
    }
    throw std::runtime_error("optimal_gain: no convergence within the sweep limit");
}

bool TransitionBounds::feasible(std::size_t s, std::size_t a) const {
    double lo_sum = 0.0, hi_sum = 0.0;
    for (std::size_t s2 = 0; s2 < num_states; ++s2) {
        const double l = lower(s, a, s2);
        const double h = upper(s, a, s2);
        if (l > h) return false;
        lo_sum += l;
        hi_sum += h;
    }
    return lo_sum <= 1.0 + 1e-12 && hi_sum >= 1.0 - 1e-12;
}

TransitionBounds TransitionBounds::vacuous(std::size_t num_states, std::size_t num_actions) {
    TransitionBounds b;
    b.num_states = num_states;
    b.num_actions = num_actions;
    b.lo.assign(num_states * num_actions * num_states, 0.0);
    b.hi.assign(num_states * num_actions * num_states, 1.0);
    return b;
}

namespace {

// Largest value of sum_{s'} P(s') u(s') over the box-constrained simplex:
// start from the lower bounds and spend the remaining mass on successors in
// decreasing value order.
double optimistic_expectation(const TransitionBounds& bounds, std::size_t s, std::size_t a,
                              const std::vector<double>& u,
                              const std::vector<std::uint32_t>& order) {
    const std::size_t S = u.size();
    double budget = 1.0;
    double value = 0.0;
    for (std::size_t s2 = 0; s2 < S; ++s2) {
        const double l = bounds.lower(s, a, s2);
        budget -= l;
        value += l * u[s2];
    }
    for (std::uint32_t s2 : order) {
        if (budget <= 0.0) break;
        const double extra =
            std::min(budget, bounds.upper(s, a, s2) - bounds.lower(s, a, s2));
        if (extra > 0.0) {
            value += extra * u[s2];
            budget -= extra;
        }
    }
    return value;
}

} // namespace

EVIResult extended_value_iteration(const TabularMDP& mdp, const TransitionBounds& bounds,
                                   double tol) {
    const std::size_t S = mdp.num_states;
    const std::size_t A = mdp.num_actions;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a)
            if (!bounds.feasible(s, a))
                throw std::invalid_argument("extended_value_iteration: infeasible bounds");

    std::vector<double> u(S, 0.0), next(S, 0.0), delta(S, 0.0);
    std::vector<std::uint32_t> order(S);
    EVIResult out;
    out.policy.assign(S, 0);

    for (std::size_t sweep = 1; sweep <= kMaxSweeps; ++sweep) {
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return u[a] > u[b]; });
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            std::uint32_t best_action = 0;
            for (std::size_t a = 0; a < A; ++a) {
                const double value =
                    mdp.r(s, a) + 0.5 * optimistic_expectation(bounds, s, a, u, order);
                if (value > best) {
                    best = value;
                    best_action = static_cast<std::uint32_t>(a);
                }
            }
            next[s] = best + 0.5 * u[s];
            out.policy[s] = best_action;
        }
        for (std::size_t s = 0; s < S; ++s) delta[s] = next[s] - u[s];
        const double residual_span = span(delta);
        const double anchor = next[0];
        for (std::size_t s = 0; s < S; ++s) u[s] = next[s] - anchor;
        if (residual_span < tol) {
            const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
            out.gain = 0.5 * (*lo + *hi);
            out.iterations = sweep;
            out.values = u;
            return out;
        }
    }
    throw std::runtime_error("extended_value_iteration: no convergence within the sweep limit");
}

} // namespace permeq
