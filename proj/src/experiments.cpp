#include "permeq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <thread>

#include "permeq/csv.hpp"
#include "permeq/theory.hpp"
#include "permeq/ucrl.hpp"

namespace permeq {

namespace {

namespace fs = std::filesystem;

// Replication fan-out: every replication is a pure function of its index, so
// results are computed on a small worker pool and reduced in index order.
template <typename T, typename Fn>
std::vector<T> run_replications(std::int64_t count, Fn&& fn) {
    std::vector<T> results(static_cast<std::size_t>(count));
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(count));
    std::atomic<std::int64_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::int64_t rep = cursor.fetch_add(1); rep < count;
                 rep = cursor.fetch_add(1))
                results[static_cast<std::size_t>(rep)] = fn(rep);
        });
    for (std::thread& worker : pool) worker.join();
    return results;
}

std::string join_indices(const std::vector<std::uint32_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += '|';
        out += std::to_string(values[i]);
    }
    return out;
}

std::string path_in(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

// Random canonical distribution with the requested support size: support
// masses are uniform spacings on the simplex, off-support symbols get zero.
std::vector<double> random_supported_distribution(int alphabet_size, int support_size,
                                                  SplitMix64& rng) {
    std::vector<double> cuts{0.0, 1.0};
    for (int i = 0; i < support_size - 1; ++i) cuts.push_back(rng.next_double());
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> q(alphabet_size, 0.0);
    for (int i = 0; i < support_size; ++i) q[i] = cuts[i + 1] - cuts[i];
    double total = 0.0;
    for (double v : q) total += v;
    q[support_size - 1] += 1.0 - total;
    return q;
}

} // namespace

ProblemInstance build_instance(const InstanceConfig& cfg, std::uint64_t seed) {
    ProblemInstance instance;
    instance.q = cfg.q;
    instance.sample_sizes = cfg.sample_sizes;
    if (cfg.random_permutations) {
        SplitMix64 rng = SplitMix64(seed).split(0x7065726dULL);
        instance.perms = random_permutations(cfg.sample_sizes.size(), cfg.q.size(), rng);
    } else {
        instance.perms = cfg.permutations;
    }
    instance.validate();
    return instance;
}

RatioStats ratio_stats(const ConfidenceTable& table, const RefinedTable& refined) {
    RatioStats stats;
    stats.min_ratio = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t k = 0; k < table.family_size(); ++k) {
        for (std::uint32_t x = 0; x < table.alphabet_size(); ++x) {
            const double refined_width = refined.cells[k][x].measure();
            if (refined.empty_cells[k][x] || refined_width <= 0.0) {
                ++stats.skipped_cells;
                continue;
            }
            const double ratio = table.cells[k][x].width() / refined_width;
            stats.min_ratio = std::min(stats.min_ratio, ratio);
            stats.max_ratio = std::max(stats.max_ratio, ratio);
            total += ratio;
            ++stats.cells;
        }
    }
    if (stats.cells == 0) stats.min_ratio = 0.0;
    else stats.mean_ratio = total / static_cast<double>(stats.cells);
    return stats;
}

void cmd_refine(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const ProblemInstance instance = build_instance(*cfg.instance, cfg.seed);
    const SampleTable samples = sample_instance(instance, cfg.seed);
    const ConfidenceTable table = build_confidence_table(samples, cfg.delta, cfg.method);
    const MatchingTable pruned =
        prune_matchings(initial_matchings(table), cfg.prune_clique_cap, nullptr);
    const RefinedTable refined = refine(pruned, table, samples);

    CsvWriter initial(path_in(out_dir, "initial.csv"), "k,x,lo,hi");
    for (std::size_t k = 0; k < table.family_size(); ++k)
        for (std::uint32_t x = 0; x < table.alphabet_size(); ++x) {
            const Interval& iv = table.cells[k][x];
            initial.row(std::to_string(k) + ',' + std::to_string(x) + ',' +
                        CsvWriter::number(iv.lo()) + ',' + CsvWriter::number(iv.hi()));
        }

    CsvWriter refined_csv(path_in(out_dir, "refined.csv"),
                          "k,x,component_index,lo,hi,pooled_group");
    for (std::size_t k = 0; k < refined.family_size(); ++k)
        for (std::uint32_t x = 0; x < refined.alphabet_size(); ++x) {
            const auto& parts = refined.cells[k][x].components();
            const std::string group = join_indices(refined.pooled_groups[k][x]);
            if (parts.empty()) {
                refined_csv.row(std::to_string(k) + ',' + std::to_string(x) + ",0,nan,nan," +
                                group);
                continue;
            }
            for (std::size_t c = 0; c < parts.size(); ++c)
                refined_csv.row(std::to_string(k) + ',' + std::to_string(x) + ',' +
                                std::to_string(c) + ',' + CsvWriter::number(parts[c].lo()) + ',' +
                                CsvWriter::number(parts[c].hi()) + ',' + group);
        }

    CsvWriter matchings_csv(path_in(out_dir, "matchings.csv"), "k,x,kprime,plausible");
    for (std::size_t k = 0; k < pruned.family_size(); ++k)
        for (std::size_t kp = 0; kp < pruned.family_size(); ++kp) {
            if (kp == k) continue;
            for (std::uint32_t x = 0; x < table.alphabet_size(); ++x)
                matchings_csv.row(std::to_string(k) + ',' + std::to_string(x) + ',' +
                                  std::to_string(kp) + ',' + join_indices(pruned.at(k, kp, x)));
        }

    CsvWriter plot(path_in(out_dir, "plotdata.csv"), "k,x,true_mass,empirical_mean");
    for (std::size_t k = 0; k < table.family_size(); ++k)
        for (std::uint32_t x = 0; x < table.alphabet_size(); ++x)
            plot.row(std::to_string(k) + ',' + std::to_string(x) + ',' +
                     CsvWriter::number(instance.mass(k, x)) + ',' +
                     CsvWriter::number(empirical_mean(samples.sample(k, x))));
}

struct CoverageRun {
    bool omega = false;
    std::vector<char> initial_fail;
    std::vector<char> refined_fail;
};

void cmd_coverage(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::size_t K = cfg.instance->sample_sizes.size();

    const std::vector<CoverageRun> outcomes =
        run_replications<CoverageRun>(cfg.replications, [&](std::int64_t rep) {
            const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
            const ProblemInstance instance = build_instance(*cfg.instance, seed);
            const SampleTable samples = sample_instance(instance, seed);
            const ConfidenceTable table = build_confidence_table(samples, cfg.delta, cfg.method);
            const MatchingTable pruned =
                prune_matchings(initial_matchings(table), cfg.prune_clique_cap, nullptr);
            const RefinedTable refined = refine(pruned, table, samples);

            CoverageRun run;
            run.omega = initial_sets_valid(instance, samples, cfg.delta, cfg.method);
            run.initial_fail.assign(K, 0);
            run.refined_fail.assign(K, 0);
            for (std::size_t k = 0; k < K; ++k) {
                for (std::uint32_t x = 0; x < instance.alphabet_size(); ++x) {
                    const double truth = instance.mass(k, x);
                    if (!table.cells[k][x].contains(truth)) run.initial_fail[k] = 1;
                    if (!refined.cells[k][x].contains(truth)) run.refined_fail[k] = 1;
                }
            }
            return run;
        });

    std::vector<std::int64_t> initial_failures(K, 0), refined_failures(K, 0);
    std::int64_t omega_failures = 0;
    CsvWriter runs(path_in(out_dir, "coverage_runs.csv"),
                   "rep,k,omega_valid,initial_fail,refined_fail");
    for (std::int64_t rep = 0; rep < cfg.replications; ++rep) {
        const CoverageRun& run = outcomes[static_cast<std::size_t>(rep)];
        if (!run.omega) ++omega_failures;
        for (std::size_t k = 0; k < K; ++k) {
            initial_failures[k] += run.initial_fail[k];
            refined_failures[k] += run.refined_fail[k];
            runs.row(std::to_string(rep) + ',' + std::to_string(k) + ',' +
                     std::to_string(run.omega ? 1 : 0) + ',' +
                     std::to_string(run.initial_fail[k] ? 1 : 0) + ',' +
                     std::to_string(run.refined_fail[k] ? 1 : 0));
        }
    }

    const double n = static_cast<double>(cfg.replications);
    const double refined_bound = static_cast<double>(K) * cfg.delta;
    CsvWriter summary(path_in(out_dir, "coverage_summary.csv"),
                      "k,runs,initial_fail_rate,initial_bound,refined_fail_rate,refined_bound,"
                      "omega_fail_rate");
    for (std::size_t k = 0; k < K; ++k)
        summary.row(std::to_string(k) + ',' + std::to_string(cfg.replications) + ',' +
                    CsvWriter::number(initial_failures[k] / n) + ',' +
                    CsvWriter::number(cfg.delta) + ',' +
                    CsvWriter::number(refined_failures[k] / n) + ',' +
                    CsvWriter::number(std::min(1.0, refined_bound)) + ',' +
                    CsvWriter::number(omega_failures / n));
}

namespace {

struct RatioSummary {
    double mean_of_min = 0.0;
    double mean_of_mean = 0.0;
    double mean_of_max = 0.0;
    std::size_t skipped = 0;
};

RatioSummary ratio_point(const RatioConfig& rc, const CIMethod& method, double delta,
                         std::int64_t clique_cap, std::int64_t n_primary, std::uint64_t seed,
                         std::int64_t replications) {
    const std::vector<RatioStats> outcomes =
        run_replications<RatioStats>(replications, [&](std::int64_t rep) {
            SplitMix64 rng = SplitMix64(seed).split(static_cast<std::uint64_t>(rep));
            ProblemInstance instance;
            instance.q = random_supported_distribution(rc.alphabet_size, rc.support_size, rng);
            instance.perms = random_permutations(rc.family_size, rc.alphabet_size, rng);
            instance.sample_sizes.assign(rc.family_size,
                                         std::max<std::int64_t>(1, n_primary / 4));
            instance.sample_sizes[0] = n_primary;

            const SampleTable samples = sample_instance(instance, rng.next());
            const ConfidenceTable table = build_confidence_table(samples, delta, method);
            const MatchingTable pruned =
                prune_matchings(initial_matchings(table), clique_cap, nullptr);
            return ratio_stats(table, refine(pruned, table, samples));
        });

    RatioSummary out;
    std::size_t counted = 0;
    for (const RatioStats& stats : outcomes) {
        out.skipped += stats.skipped_cells;
        if (stats.cells == 0) continue;
        out.mean_of_min += stats.min_ratio;
        out.mean_of_mean += stats.mean_ratio;
        out.mean_of_max += stats.max_ratio;
        ++counted;
    }
    if (counted > 0) {
        out.mean_of_min /= static_cast<double>(counted);
        out.mean_of_mean /= static_cast<double>(counted);
        out.mean_of_max /= static_cast<double>(counted);
    }
    return out;
}

} // namespace

void cmd_ratio_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const RatioConfig& rc = *cfg.ratio;
    CIMethod method = cfg.method;
    method.alphabet_size = rc.alphabet_size;

    CsvWriter by_l(path_in(out_dir, "ratio_by_L.csv"),
                   "L,min_ratio,mean_ratio,max_ratio,skipped_cells");
    for (std::int64_t cap : rc.clique_caps) {
        const RatioSummary s =
            ratio_point(rc, method, cfg.delta, cap, rc.n_primary, cfg.seed, cfg.replications);
        by_l.row(std::to_string(cap) + ',' + CsvWriter::number(s.mean_of_min) + ',' +
                 CsvWriter::number(s.mean_of_mean) + ',' + CsvWriter::number(s.mean_of_max) +
                 ',' + std::to_string(s.skipped));
    }

    if (!rc.n_primary_values.empty()) {
        CsvWriter by_n(path_in(out_dir, "ratio_by_n.csv"),
                       "n_primary,min_ratio,mean_ratio,max_ratio,skipped_cells");
        for (std::int64_t n1 : rc.n_primary_values) {
            const RatioSummary s = ratio_point(rc, method, cfg.delta, cfg.prune_clique_cap, n1,
                                               cfg.seed, cfg.replications);
            by_n.row(std::to_string(n1) + ',' + CsvWriter::number(s.mean_of_min) + ',' +
                     CsvWriter::number(s.mean_of_mean) + ',' + CsvWriter::number(s.mean_of_max) +
                     ',' + std::to_string(s.skipped));
        }
    }
}

void cmd_rate_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const RateConfig& rc = *cfg.rate;
    CIMethod method = cfg.method;
    method.alphabet_size = static_cast<int>(rc.q.size());
    const RateSweepResult result =
        rate_sweep(rc.q, rc.family_size, rc.size_grid, cfg.delta, method, cfg.prune_clique_cap,
                   cfg.seed, static_cast<std::size_t>(cfg.replications));

    CsvWriter widths(path_in(out_dir, "rate_widths.csv"),
                     "n,mean_support_width,mean_offsupport_width");
    for (std::size_t i = 0; i < result.sample_sizes.size(); ++i) {
        const double off = result.mean_offsupport_width.empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : result.mean_offsupport_width[i];
        widths.row(std::to_string(result.sample_sizes[i]) + ',' +
                   CsvWriter::number(result.mean_support_width[i]) + ',' +
                   CsvWriter::number(off));
    }
    CsvWriter slopes(path_in(out_dir, "rate_slopes.csv"), "region,slope");
    slopes.row("support," + CsvWriter::number(result.support_slope));
    if (!result.mean_offsupport_width.empty())
        slopes.row("offsupport," + CsvWriter::number(result.offsupport_slope));
}

void cmd_rl(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const RlConfig& rc = *cfg.rl;
    const auto [mdp, classes] = riverswim(static_cast<std::size_t>(rc.num_states));

    struct AlgoSpec {
        std::string name;
        bool constrained;
    };
    std::vector<AlgoSpec> algos;
    if (rc.run_ucrl2b) algos.push_back({"ucrl2b", false});
    if (rc.run_c_ucrl2b) algos.push_back({"c-ucrl2b", true});

    CsvWriter summary(path_in(out_dir, "rl_summary.csv"),
                      "algo,seed,T,final_regret,episodes,fallback_events,empty_refined_events");
    std::vector<double> means;
    for (const AlgoSpec& algo : algos) {
        const std::vector<RegretTrace> traces =
            run_replications<RegretTrace>(cfg.replications, [&](std::int64_t rep) {
                const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
                return algo.constrained
                           ? run_c_ucrl2b(mdp, classes, rc.horizon, cfg.delta, seed,
                                          cfg.prune_clique_cap)
                           : run_ucrl2b(mdp, rc.horizon, cfg.delta, seed);
            });
        double total_final = 0.0;
        for (const RegretTrace& trace : traces) {
            total_final += trace.cumulative_regret.back();
            summary.row(algo.name + ',' + std::to_string(trace.seed) + ',' +
                        std::to_string(rc.horizon) + ',' +
                        CsvWriter::number(trace.cumulative_regret.back()) + ',' +
                        std::to_string(trace.episodes.size()) + ',' +
                        std::to_string(trace.fallback_events) + ',' +
                        std::to_string(trace.empty_refined_events));

            CsvWriter trace_csv(path_in(out_dir, "rl_trace_" + algo.name + "_" +
                                                     std::to_string(trace.seed) + ".csv"),
                                "t,cumulative_regret,episode_id");
            for (std::int64_t t = 1; t <= rc.horizon; t += rc.trace_stride)
                trace_csv.row(std::to_string(t) + ',' +
                              CsvWriter::number(trace.cumulative_regret[t - 1]) + ',' +
                              std::to_string(trace.episode_of_step[t - 1]));
        }
        means.push_back(total_final / static_cast<double>(cfg.replications));
    }

    CsvWriter comparison(path_in(out_dir, "rl_comparison.csv"), "algo,mean_final_regret");
    for (std::size_t i = 0; i < algos.size(); ++i)
        comparison.row(algos[i].name + ',' + CsvWriter::number(means[i]));
}

void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    switch (cfg.kind) {
        case ExperimentKind::Refine: cmd_refine(cfg, out_dir); return;
        case ExperimentKind::Coverage: cmd_coverage(cfg, out_dir); return;
        case ExperimentKind::RatioSweep: cmd_ratio_sweep(cfg, out_dir); return;
        case ExperimentKind::RateSweep: cmd_rate_sweep(cfg, out_dir); return;
        case ExperimentKind::Rl: cmd_rl(cfg, out_dir); return;
    }
    throw std::logic_error("run_experiment: unhandled kind");
}

} // namespace permeq
