#pragma once

#include <cstdint>
#include <vector>

#include "permeq/interval_union.hpp"
#include "permeq/rng.hpp"
#include "permeq/stats.hpp"

namespace permeq {

// Sorted set of alphabet symbols (ascending, unique).
using SymbolSet = std::vector<std::uint32_t>;

bool symbol_set_contains(const SymbolSet& set, std::uint32_t x);
SymbolSet symbol_set_difference(const SymbolSet& a, const SymbolSet& b);

// A family of distributions that are all relabelings of one canonical
// distribution q: member k places mass q[perms[k][x]] on symbol x.
struct ProblemInstance {
    std::vector<double> q;
    std::vector<std::vector<std::uint32_t>> perms;
    std::vector<std::int64_t> sample_sizes;

    std::size_t alphabet_size() const { return q.size(); }
    std::size_t family_size() const { return perms.size(); }
    double mass(std::size_t k, std::uint32_t x) const { return q[perms[k][x]]; }
    // Symbol of member kp carrying the same canonical atom as symbol x of
    // member k; unique on the support when the masses are distinct.
    std::uint32_t matched_symbol(std::size_t k, std::uint32_t x, std::size_t kp) const;

    // All nonzero masses pairwise distinct; required by the separation
    // guarantees, reported rather than enforced.
    bool distinct_support_masses() const;

    void validate() const;
};

// Uniformly random permutations for each family member.
std::vector<std::vector<std::uint32_t>> random_permutations(std::size_t family_size,
                                                            std::size_t alphabet_size,
                                                            SplitMix64& rng);

// Per-member symbol counts; row k sums to sample_sizes[k].
struct SampleTable {
    std::vector<std::vector<std::int64_t>> counts;

    std::size_t family_size() const { return counts.size(); }
    std::size_t alphabet_size() const { return counts.empty() ? 0 : counts[0].size(); }
    std::int64_t total(std::size_t k) const;
    BernoulliSample sample(std::size_t k, std::uint32_t x) const;
};

// i.i.d. draws from every member distribution; deterministic in (instance, seed).
SampleTable sample_instance(const ProblemInstance& instance, std::uint64_t seed);

// Per-(member, symbol) confidence intervals together with the constructor
// they came from, so downstream pooling can rebuild intervals consistently.
struct ConfidenceTable {
    std::vector<std::vector<Interval>> cells;
    double delta = 0.0;
    CIMethod method;

    std::size_t family_size() const { return cells.size(); }
    std::size_t alphabet_size() const { return cells.empty() ? 0 : cells[0].size(); }
};

ConfidenceTable build_confidence_table(const SampleTable& table, double delta,
                                       const CIMethod& method);

// Plausible matching sets: sets[k][kp][x] lists the symbols of member kp whose
// intervals meet the interval of symbol x of member k. pair_voided marks
// ordered pairs removed entirely by the near-equivalence rule.
struct MatchingTable {
    std::vector<std::vector<std::vector<SymbolSet>>> sets;
    std::vector<std::vector<char>> pair_voided;

    std::size_t family_size() const { return sets.size(); }
    std::size_t alphabet_size() const;
    const SymbolSet& at(std::size_t k, std::size_t kp, std::uint32_t x) const {
        return sets[k][kp][x];
    }
};

MatchingTable initial_matchings(const ConfidenceTable& table);

// Ordered pairs (k, kp) with at least one empty matching set lose all their
// entries; such a kp contributes neither pooling nor intersections to k.
// Returns the number of voided ordered pairs.
std::size_t void_separated_pairs(MatchingTable& matchings);

struct PruneDiagnostics {
    // Triplets whose candidate clique was larger than the matching set:
    // unreachable when every confidence set is valid.
    std::size_t clique_anomalies = 0;
    std::size_t iterations = 0;
    std::size_t passes = 0;
};

// One-to-one pruning of the matching sets. Each sweep repeatedly picks the
// unexamined triplet (k, kp, x) with the smallest matching set (ties broken
// lexicographically on (k, kp, x)); when the symbols sharing that exact set
// form a clique of matching size, the set is subtracted from every other
// entry of the pair. A sweep stops once the smallest set exceeds max_clique;
// sweeps repeat until the table stops changing, so the operation is
// idempotent. Output sets are entrywise subsets of the input; deterministic.
MatchingTable prune_matchings(const MatchingTable& matchings, std::int64_t max_clique,
                              PruneDiagnostics* diagnostics = nullptr);

// Refined per-(member, symbol) confidence sets plus the bookkeeping needed to
// audit them: which members were pooled, and where the output came up empty
// (evidence that some initial set missed the truth, not an error).
struct RefinedTable {
    std::vector<std::vector<IntervalUnion>> cells;
    std::vector<std::vector<std::vector<std::uint32_t>>> pooled_groups;
    std::vector<std::vector<char>> empty_cells;
    std::size_t empty_count = 0;
    std::size_t voided_pairs = 0;

    std::size_t family_size() const { return cells.size(); }
    std::size_t alphabet_size() const { return cells.empty() ? 0 : cells[0].size(); }
};

// Exact-equivalence refinement: pool the samples of uniquely matched peers
// and intersect with the union of candidate intervals of every ambiguous
// peer. Uses the delta and constructor recorded in the confidence table.
RefinedTable refine(const MatchingTable& matchings, const ConfidenceTable& table,
                    const SampleTable& samples);

// Near-equivalence variant for families within total variation epsilon of an
// exactly equivalent one. Pipeline order: initial_matchings, then
// void_separated_pairs, then prune_matchings, then this call. Voided pairs
// contribute nothing, and pooling additionally requires the matched peer
// interval to have diameter at most eta_tol (0 <= eta_tol <= epsilon); the
// intersection step is unchanged. The output bias guarantee (at most epsilon
// in total variation) is documented, not checked at runtime.
RefinedTable near_equivalence_refine(const MatchingTable& matchings, const ConfidenceTable& table,
                                     const SampleTable& samples, double epsilon, double eta_tol);

// Exhaustive small-instance oracle: all alphabet permutations compatible with
// the confidence tables of one ordered pair, plus the matching sets they
// induce. Guarded to alphabets of at most 9 symbols.
struct BruteForceResult {
    std::vector<std::vector<std::uint32_t>> permutations;
    std::vector<SymbolSet> exact_matchings;
};

BruteForceResult brute_force_matchings(const ConfidenceTable& table, std::size_t k,
                                       std::size_t kp);

} // namespace permeq
