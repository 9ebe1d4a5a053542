#include "permeq/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace permeq {

bool symbol_set_contains(const SymbolSet& set, std::uint32_t x) {
    return std::binary_search(set.begin(), set.end(), x);
}

SymbolSet symbol_set_difference(const SymbolSet& a, const SymbolSet& b) {
    SymbolSet out;
    out.reserve(a.size());
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::uint32_t ProblemInstance::matched_symbol(std::size_t k, std::uint32_t x,
                                              std::size_t kp) const {
    const std::uint32_t atom = perms[k][x];
    for (std::uint32_t xp = 0; xp < perms[kp].size(); ++xp) {
        if (perms[kp][xp] == atom) return xp;
    }
    throw std::logic_error("matched_symbol: permutation is not a bijection");
}

bool ProblemInstance::distinct_support_masses() const {
    std::vector<double> positive;
    for (double v : q)
        if (v > 0.0) positive.push_back(v);
    std::sort(positive.begin(), positive.end());
    return std::adjacent_find(positive.begin(), positive.end()) == positive.end();
}

void ProblemInstance::validate() const {
    if (q.empty()) throw std::invalid_argument("instance: empty alphabet");
    double total = 0.0;
    for (double v : q) {
        if (v < 0.0) throw std::invalid_argument("instance: negative mass");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("instance: masses must sum to 1 within 1e-12");
    if (perms.empty()) throw std::invalid_argument("instance: no distributions");
    if (sample_sizes.size() != perms.size())
        throw std::invalid_argument("instance: one sample size per distribution required");
    for (const auto& perm : perms) {
        if (perm.size() != q.size())
            throw std::invalid_argument("instance: permutation has wrong length");
        std::vector<char> seen(q.size(), 0);
        for (std::uint32_t v : perm) {
            if (v >= q.size() || seen[v])
                throw std::invalid_argument("instance: permutation is not a bijection");
            seen[v] = 1;
        }
    }
    for (std::int64_t n : sample_sizes)
        if (n < 1) throw std::invalid_argument("instance: sample sizes must be >= 1");
}

std::vector<std::vector<std::uint32_t>> random_permutations(std::size_t family_size,
                                                            std::size_t alphabet_size,
                                                            SplitMix64& rng) {
    std::vector<std::vector<std::uint32_t>> perms(family_size);
    for (auto& perm : perms) {
        perm.resize(alphabet_size);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = alphabet_size; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.next() % i);
            std::swap(perm[i - 1], perm[j]);
        }
    }
    return perms;
}

std::int64_t SampleTable::total(std::size_t k) const {
    return std::accumulate(counts[k].begin(), counts[k].end(), std::int64_t{0});
}

BernoulliSample SampleTable::sample(std::size_t k, std::uint32_t x) const {
    return BernoulliSample{counts[k][x], total(k)};
}

SampleTable sample_instance(const ProblemInstance& instance, std::uint64_t seed) {
    instance.validate();
    const std::size_t K = instance.family_size();
    const std::size_t X = instance.alphabet_size();
    SampleTable table;
    table.counts.assign(K, std::vector<std::int64_t>(X, 0));
    SplitMix64 root(seed);
    for (std::size_t k = 0; k < K; ++k) {
        SplitMix64 rng = root.split(k);
        std::vector<double> cumulative(X);
        double acc = 0.0;
        for (std::uint32_t x = 0; x < X; ++x) {
            acc += instance.mass(k, x);
            cumulative[x] = acc;
        }
        cumulative[X - 1] = 1.0;
        for (std::int64_t i = 0; i < instance.sample_sizes[k]; ++i)
            ++table.counts[k][discrete_draw(cumulative, rng)];
    }
    return table;
}

ConfidenceTable build_confidence_table(const SampleTable& table, double delta,
                                       const CIMethod& method) {
    if (static_cast<std::size_t>(method.alphabet_size) != table.alphabet_size())
        throw std::invalid_argument(
            "build_confidence_table: method alphabet_size must match the table");
    ConfidenceTable out;
    out.delta = delta;
    out.method = method;
    const std::size_t K = table.family_size();
    const std::size_t X = table.alphabet_size();
    out.cells.assign(K, std::vector<Interval>(X));
    for (std::size_t k = 0; k < K; ++k) {
        const std::int64_t n = table.total(k);
        for (std::uint32_t x = 0; x < X; ++x)
            out.cells[k][x] = confidence_interval({table.counts[k][x], n}, delta, method);
    }
    return out;
}

std::size_t MatchingTable::alphabet_size() const {
    if (sets.empty()) return 0;
    for (std::size_t kp = 0; kp < sets[0].size(); ++kp)
        if (!sets[0][kp].empty()) return sets[0][kp].size();
    return 0;
}

MatchingTable initial_matchings(const ConfidenceTable& table) {
    const std::size_t K = table.family_size();
    const std::size_t X = table.alphabet_size();
    MatchingTable out;
    out.sets.assign(K, std::vector<std::vector<SymbolSet>>(K));
    out.pair_voided.assign(K, std::vector<char>(K, 0));
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t kp = 0; kp < K; ++kp) {
            if (kp == k) continue;
            out.sets[k][kp].assign(X, SymbolSet{});
            for (std::uint32_t x = 0; x < X; ++x) {
                SymbolSet& set = out.sets[k][kp][x];
                for (std::uint32_t xp = 0; xp < X; ++xp)
                    if (table.cells[k][x].intersects(table.cells[kp][xp])) set.push_back(xp);
            }
        }
    }
    return out;
}

std::size_t void_separated_pairs(MatchingTable& matchings) {
    const std::size_t K = matchings.family_size();
    std::size_t voided = 0;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t kp = 0; kp < K; ++kp) {
            if (kp == k || matchings.sets[k][kp].empty()) continue;
            const bool separated =
                std::any_of(matchings.sets[k][kp].begin(), matchings.sets[k][kp].end(),
                            [](const SymbolSet& s) { return s.empty(); });
            if (separated) {
                for (SymbolSet& s : matchings.sets[k][kp]) s.clear();
                matchings.pair_voided[k][kp] = 1;
                ++voided;
            }
        }
    }
    return voided;
}

namespace {

struct Triplet {
    std::uint32_t k, kp, x;
    bool operator<(const Triplet& o) const {
        if (k != o.k) return k < o.k;
        if (kp != o.kp) return kp < o.kp;
        return x < o.x;
    }
};

} // namespace

namespace {

// One examination sweep: every triplet gets examined once, smallest set
// first, cliques subtract their set from the rest of the pair. Returns
// whether any entry changed.
bool prune_pass(MatchingTable& out, std::int64_t max_clique, PruneDiagnostics& diag) {
    const std::size_t K = out.family_size();
    const std::size_t X = out.alphabet_size();

    std::vector<Triplet> pending;
    for (std::uint32_t k = 0; k < K; ++k)
        for (std::uint32_t kp = 0; kp < K; ++kp) {
            if (kp == k || out.pair_voided[k][kp]) continue;
            for (std::uint32_t x = 0; x < X; ++x) pending.push_back({k, kp, x});
        }
    std::vector<char> active(pending.size(), 1);
    std::size_t active_count = pending.size();
    bool changed = false;

    while (active_count > 0) {
        ++diag.iterations;
        // Smallest matching set among unexamined triplets; pending is in
        // lexicographic (k, kp, x) order, so the first strict minimum wins ties.
        std::size_t best = pending.size();
        std::size_t best_size = 0;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (!active[i]) continue;
            const Triplet& t = pending[i];
            const std::size_t sz = out.sets[t.k][t.kp][t.x].size();
            if (best == pending.size() || sz < best_size) {
                best = i;
                best_size = sz;
            }
        }
        if (static_cast<std::int64_t>(best_size) > max_clique) break;

        const Triplet t = pending[best];
        const SymbolSet target = out.sets[t.k][t.kp][t.x];
        SymbolSet clique;
        std::vector<std::size_t> clique_indices;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (!active[i]) continue;
            const Triplet& o = pending[i];
            if (o.k != t.k || o.kp != t.kp) continue;
            if (out.sets[o.k][o.kp][o.x] == target) {
                clique.push_back(o.x);
                clique_indices.push_back(i);
            }
        }

        if (clique.size() == target.size()) {
            for (std::uint32_t x = 0; x < X; ++x) {
                if (symbol_set_contains(clique, x)) continue;
                SymbolSet reduced = symbol_set_difference(out.sets[t.k][t.kp][x], target);
                if (reduced.size() != out.sets[t.k][t.kp][x].size()) {
                    out.sets[t.k][t.kp][x] = std::move(reduced);
                    changed = true;
                }
            }
            for (std::size_t i : clique_indices) {
                active[i] = 0;
                --active_count;
            }
        } else {
            if (clique.size() > target.size()) ++diag.clique_anomalies;
            active[best] = 0;
            --active_count;
        }
    }
    return changed;
}

} // namespace

MatchingTable prune_matchings(const MatchingTable& matchings, std::int64_t max_clique,
                              PruneDiagnostics* diagnostics) {
    if (max_clique < 1) throw std::invalid_argument("prune_matchings: max_clique must be >= 1");
    MatchingTable out = matchings;
    PruneDiagnostics local;
    // A retired triplet's set can shrink through later subtractions, which
    // may unlock further cliques; sweeping until a fixed point makes the
    // result idempotent. Each extra sweep removes at least one symbol, so
    // the loop is bounded by the total set size.
    while (prune_pass(out, max_clique, local)) ++local.passes;
    ++local.passes;
    if (diagnostics) *diagnostics = local;
    return out;
}

namespace {

enum class RefineMode { Exact, NearEquivalence };

RefinedTable refine_impl(const MatchingTable& matchings, const ConfidenceTable& table,
                         const SampleTable& samples, RefineMode mode, double eta_tol) {
    const std::size_t K = table.family_size();
    const std::size_t X = table.alphabet_size();
    if (matchings.family_size() != K || samples.family_size() != K ||
        samples.alphabet_size() != X)
        throw std::invalid_argument("refine: inconsistent table shapes");

    RefinedTable out;
    out.cells.assign(K, std::vector<IntervalUnion>(X));
    out.pooled_groups.assign(K, std::vector<std::vector<std::uint32_t>>(X));
    out.empty_cells.assign(K, std::vector<char>(X, 0));
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t kp = 0; kp < K; ++kp)
            if (kp != k && matchings.pair_voided[k][kp]) ++out.voided_pairs;

    for (std::size_t k = 0; k < K; ++k) {
        for (std::uint32_t x = 0; x < X; ++x) {
            std::vector<std::uint32_t> group{static_cast<std::uint32_t>(k)};
            BernoulliSample pooled = samples.sample(k, x);
            for (std::size_t kp = 0; kp < K; ++kp) {
                if (kp == k || matchings.pair_voided[k][kp]) continue;
                const SymbolSet& set = matchings.at(k, kp, x);
                if (set.size() != 1) continue;
                const std::uint32_t match = set.front();
                if (mode == RefineMode::NearEquivalence &&
                    table.cells[kp][match].width() > eta_tol)
                    continue;
                group.push_back(static_cast<std::uint32_t>(kp));
                const BernoulliSample peer = samples.sample(kp, match);
                pooled.ones += peer.ones;
                pooled.n += peer.n;
            }
            std::sort(group.begin(), group.end());

            // With no pooled peer the interval is exactly the initial one;
            // reuse it rather than rebuilding from the sample.
            Interval pooled_interval =
                group.size() == 1 ? table.cells[k][x]
                                  : confidence_interval(pooled, table.delta, table.method);
            IntervalUnion refined(pooled_interval);

            for (std::size_t kp = 0; kp < K; ++kp) {
                if (kp == k || matchings.pair_voided[k][kp]) continue;
                const SymbolSet& set = matchings.at(k, kp, x);
                // Uniquely matched peers refine through pooling; in
                // near-equivalence mode a too-wide unique match contributes
                // nothing at all, matching the modified pooling rule.
                if (set.size() == 1) continue;
                std::vector<Interval> candidates;
                candidates.reserve(set.size());
                for (std::uint32_t xp : set) candidates.push_back(table.cells[kp][xp]);
                refined = intersect(refined, IntervalUnion::from_intervals(std::move(candidates)));
                if (refined.is_empty()) break;
            }

            out.cells[k][x] = refined;
            out.pooled_groups[k][x] = std::move(group);
            if (refined.is_empty()) {
                out.empty_cells[k][x] = 1;
                ++out.empty_count;
            }
        }
    }
    return out;
}

} // namespace

RefinedTable refine(const MatchingTable& matchings, const ConfidenceTable& table,
                    const SampleTable& samples) {
    return refine_impl(matchings, table, samples, RefineMode::Exact, 0.0);
}

RefinedTable near_equivalence_refine(const MatchingTable& matchings, const ConfidenceTable& table,
                                     const SampleTable& samples, double epsilon, double eta_tol) {
    if (!(epsilon >= 0.0) || !(eta_tol >= 0.0) || eta_tol > epsilon)
        throw std::invalid_argument("near_equivalence_refine: need 0 <= eta_tol <= epsilon");
    return refine_impl(matchings, table, samples, RefineMode::NearEquivalence, eta_tol);
}

BruteForceResult brute_force_matchings(const ConfidenceTable& table, std::size_t k,
                                       std::size_t kp) {
    const std::size_t X = table.alphabet_size();
    if (X > 9)
        throw std::invalid_argument("brute_force_matchings: alphabet too large (limit 9)");
    if (k == kp || k >= table.family_size() || kp >= table.family_size())
        throw std::invalid_argument("brute_force_matchings: invalid pair");

    BruteForceResult out;
    out.exact_matchings.assign(X, SymbolSet{});
    std::vector<std::uint32_t> perm(X);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::vector<char>> seen(X, std::vector<char>(X, 0));
    do {
        bool compatible = true;
        for (std::uint32_t x = 0; x < X && compatible; ++x)
            compatible = table.cells[k][x].intersects(table.cells[kp][perm[x]]);
        if (compatible) {
            out.permutations.push_back(perm);
            for (std::uint32_t x = 0; x < X; ++x) seen[x][perm[x]] = 1;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (std::uint32_t x = 0; x < X; ++x)
        for (std::uint32_t xp = 0; xp < X; ++xp)
            if (seen[x][xp]) out.exact_matchings[x].push_back(xp);
    return out;
}

} // namespace permeq
