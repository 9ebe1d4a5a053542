#include "permeq/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace permeq {

namespace {

constexpr double kContainmentSlack = 1e-9;

std::vector<std::uint32_t> support_symbols(const ProblemInstance& instance, std::size_t k) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t x = 0; x < instance.alphabet_size(); ++x)
        if (instance.mass(k, x) > 0.0) out.push_back(x);
    return out;
}

} // namespace

std::vector<std::uint32_t> support_pool_set(const ProblemInstance& instance, std::size_t k,
                                            std::uint32_t x, double delta,
                                            const CIMethod& method) {
    if (instance.mass(k, x) <= 0.0)
        throw std::domain_error("support_pool_set: symbol outside the support");
    const double px = instance.mass(k, x);
    const double own_width = surrogate_halfwidth(method, px, instance.sample_sizes[k], delta);
    std::vector<std::uint32_t> out{static_cast<std::uint32_t>(k)};
    for (std::uint32_t kp = 0; kp < instance.family_size(); ++kp) {
        if (kp == k) continue;
        bool separated = true;
        for (std::uint32_t x1 = 0; x1 < instance.alphabet_size() && separated; ++x1) {
            if (x1 == x) continue;
            const double gap = std::abs(px - instance.mass(k, x1)) / 2.0;
            const double peer_width =
                surrogate_halfwidth(method, instance.mass(k, x1), instance.sample_sizes[kp], delta);
            separated = gap > own_width + peer_width;
        }
        if (separated) out.push_back(kp);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double offsupport_pool_threshold(const ProblemInstance& instance, std::size_t k, std::int64_t n,
                                 double delta, const CIMethod& method) {
    const double zero_width = surrogate_halfwidth(method, 0.0, instance.sample_sizes[k], delta);
    double worst = 0.0;
    for (std::uint32_t x : support_symbols(instance, k)) {
        const double w = surrogate_halfwidth(method, instance.mass(k, x), n, delta);
        worst = std::max(worst, 2.0 * (w + zero_width));
    }
    return worst;
}

TheoreticalSets theoretical_sets(const ProblemInstance& instance, double delta,
                                 const CIMethod& method) {
    instance.validate();
    const std::size_t K = instance.family_size();
    const std::size_t X = instance.alphabet_size();

    TheoreticalSets out;
    out.support_pool_sets.assign(K, std::vector<std::vector<std::uint32_t>>(X));
    out.offsupport_pool_sets.assign(K, {});
    out.offsupport_thresholds.assign(K, std::vector<double>(K, 0.0));

    out.min_support_mass = std::numeric_limits<double>::infinity();
    std::size_t support_size = 0;
    for (double v : instance.q) {
        if (v > 0.0) {
            out.min_support_mass = std::min(out.min_support_mass, v);
            ++support_size;
        }
    }
    if (support_size == 0) throw std::invalid_argument("theoretical_sets: empty support");
    out.offsupport_vacuous = support_size == X;

    for (std::size_t k = 0; k < K; ++k) {
        for (std::uint32_t x : support_symbols(instance, k))
            out.support_pool_sets[k][x] = support_pool_set(instance, k, x, delta, method);

        std::vector<std::uint32_t> pool{static_cast<std::uint32_t>(k)};
        for (std::uint32_t kp = 0; kp < K; ++kp) {
            if (kp == k) continue;
            const double threshold =
                offsupport_pool_threshold(instance, k, instance.sample_sizes[kp], delta, method);
            out.offsupport_thresholds[k][kp] = threshold;
            if (!out.offsupport_vacuous && out.min_support_mass > threshold) pool.push_back(kp);
        }
        std::sort(pool.begin(), pool.end());
        out.offsupport_pool_sets[k] = std::move(pool);
    }
    return out;
}

bool initial_sets_valid(const ProblemInstance& instance, const SampleTable& samples, double delta,
                        const CIMethod& method) {
    for (std::size_t k = 0; k < instance.family_size(); ++k)
        for (std::uint32_t x = 0; x < instance.alphabet_size(); ++x)
            if (!confidence_set_contains(method, samples.sample(k, x), delta,
                                         instance.mass(k, x)))
                return false;
    return true;
}

ContainmentReport check_theorem_containment(const RefinedTable& refined,
                                            const ProblemInstance& instance,
                                            const SampleTable& samples, double delta,
                                            const CIMethod& method, std::uint64_t run_id) {
    const std::size_t K = instance.family_size();
    const std::size_t X = instance.alphabet_size();
    ContainmentReport report;
    report.omega_valid = initial_sets_valid(instance, samples, delta, method);
    const TheoreticalSets sets = theoretical_sets(instance, delta, method);

    std::size_t offsupport_count = X;
    for (double v : instance.q)
        if (v > 0.0) --offsupport_count;

    for (std::uint32_t k = 0; k < K; ++k) {
        for (std::uint32_t x = 0; x < X; ++x) {
            ContainmentRow row;
            row.run_id = run_id;
            row.k = k;
            row.x = x;
            row.in_support = instance.mass(k, x) > 0.0;
            row.omega_valid = report.omega_valid;
            row.refined_width = refined.cells[k][x].measure();

            if (row.in_support) {
                const auto& pool = sets.support_pool_sets[k][x];
                std::int64_t pooled_n = 0;
                std::int64_t pooled_ones = 0;
                for (std::uint32_t kp : pool) {
                    const std::uint32_t xp = instance.matched_symbol(k, x, kp);
                    pooled_ones += samples.counts[kp][xp];
                    pooled_n += instance.sample_sizes[kp];
                }
                const double pooled_mean =
                    static_cast<double>(pooled_ones) / static_cast<double>(pooled_n);
                const double halfwidth =
                    surrogate_halfwidth(method, instance.mass(k, x), pooled_n, delta);
                row.sci_width = 2.0 * halfwidth;
                if (report.omega_valid && !refined.cells[k][x].is_empty()) {
                    const Interval hull = refined.cells[k][x].hull();
                    row.pass = hull.lo() >= pooled_mean - halfwidth - kContainmentSlack &&
                               hull.hi() <= pooled_mean + halfwidth + kContainmentSlack;
                }
            } else if (!sets.offsupport_vacuous) {
                const auto& pool = sets.offsupport_pool_sets[k];
                std::int64_t pooled_n = 0;
                std::int64_t max_n = 0;
                for (std::uint32_t kp : pool) {
                    pooled_n += instance.sample_sizes[kp];
                    max_n = std::max(max_n, instance.sample_sizes[kp]);
                }
                const std::int64_t bound_n = offsupport_count > 1 ? max_n : pooled_n;
                const double bound = surrogate_halfwidth(method, 0.0, bound_n, delta);
                row.sci_width = bound;
                if (report.omega_valid && !refined.cells[k][x].is_empty())
                    row.pass = refined.cells[k][x].hull().hi() <= bound + kContainmentSlack;
            }

            if (report.omega_valid && !row.pass) ++report.failures;
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string containment_csv_header() {
    return "run_id,k,x,in_support,omega_valid,containment_pass,refined_width,sci_width";
}

std::string containment_csv_row(const ContainmentRow& row) {
    std::ostringstream out;
    out.precision(12);
    out << row.run_id << ',' << row.k << ',' << row.x << ',' << (row.in_support ? 1 : 0) << ','
        << (row.omega_valid ? 1 : 0) << ',' << (row.pass ? 1 : 0) << ',' << row.refined_width
        << ',' << row.sci_width;
    return out.str();
}

namespace {

double log_log_slope(const std::vector<std::int64_t>& xs, const std::vector<double>& ys) {
    const std::size_t m = xs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = std::log(static_cast<double>(xs[i]));
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double md = static_cast<double>(m);
    return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

} // namespace

RateSweepResult rate_sweep(const std::vector<double>& q, std::size_t family_size,
                           const std::vector<std::int64_t>& size_grid, double delta,
                           const CIMethod& method, std::int64_t max_clique, std::uint64_t seed,
                           std::size_t replications) {
    RateSweepResult out;
    out.sample_sizes = size_grid;
    SplitMix64 root(seed);

    for (std::size_t gi = 0; gi < size_grid.size(); ++gi) {
        const std::int64_t n = size_grid[gi];
        double support_total = 0.0, offsupport_total = 0.0;
        std::size_t support_cells = 0, offsupport_cells = 0;
        for (std::size_t rep = 0; rep < replications; ++rep) {
            SplitMix64 rng = root.split(gi * 1000003ULL + rep);
            ProblemInstance instance;
            instance.q = q;
            instance.perms = random_permutations(family_size, q.size(), rng);
            instance.sample_sizes.assign(family_size, n);
            const SampleTable samples = sample_instance(instance, rng.next());
            const ConfidenceTable table = build_confidence_table(samples, delta, method);
            const MatchingTable pruned =
                prune_matchings(initial_matchings(table), max_clique, nullptr);
            const RefinedTable refined = refine(pruned, table, samples);
            for (std::size_t k = 0; k < family_size; ++k) {
                for (std::uint32_t x = 0; x < q.size(); ++x) {
                    const double w = refined.cells[k][x].measure();
                    if (instance.mass(k, x) > 0.0) {
                        support_total += w;
                        ++support_cells;
                    } else {
                        offsupport_total += w;
                        ++offsupport_cells;
                    }
                }
            }
        }
        out.mean_support_width.push_back(support_total / static_cast<double>(support_cells));
        if (offsupport_cells > 0)
            out.mean_offsupport_width.push_back(offsupport_total /
                                                static_cast<double>(offsupport_cells));
    }

    out.support_slope = log_log_slope(size_grid, out.mean_support_width);
    if (!out.mean_offsupport_width.empty())
        out.offsupport_slope = log_log_slope(size_grid, out.mean_offsupport_width);
    return out;
}

} // namespace permeq
