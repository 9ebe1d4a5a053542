#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "permeq/equivalence.hpp"

namespace permeq {

// Deterministic problem-dependent pooling guarantees. support_pool_sets[k][x]
// (defined for x in the support of member k, empty elsewhere) lists the
// members whose samples are provably pooled with (k, x) once every confidence
// set is valid; offsupport_pool_sets[k] plays the same role for symbols
// outside the support. Both always contain k itself and only grow as any
// sample size grows.
struct TheoreticalSets {
    std::vector<std::vector<std::vector<std::uint32_t>>> support_pool_sets;
    std::vector<std::vector<std::uint32_t>> offsupport_pool_sets;
    double min_support_mass = 0.0;
    // Separation thresholds per (k, peer): offsupport_thresholds[k][kp] is the
    // value the minimum support mass must exceed for kp to pool with k.
    std::vector<std::vector<double>> offsupport_thresholds;
    bool offsupport_vacuous = false;
};

// Members k' whose samples provably merge with symbol x of member k: the
// mass gaps of member k must dominate the surrogate widths at sizes
// (n_k, n_k'). Throws std::domain_error when x is outside the support.
std::vector<std::uint32_t> support_pool_set(const ProblemInstance& instance, std::size_t k,
                                            std::uint32_t x, double delta,
                                            const CIMethod& method);

// Separation threshold for off-support pooling: the largest over support
// symbols of twice the surrogate width at size n plus the zero-mass surrogate
// width at size n_k.
double offsupport_pool_threshold(const ProblemInstance& instance, std::size_t k, std::int64_t n,
                                 double delta, const CIMethod& method);

// Both set families plus the quantities they are built from. The off-support
// sets are flagged vacuous when q has full support.
TheoreticalSets theoretical_sets(const ProblemInstance& instance, double delta,
                                 const CIMethod& method);

// Every initial confidence set contains its true mass (the event the
// refinement guarantees are conditioned on).
bool initial_sets_valid(const ProblemInstance& instance, const SampleTable& samples, double delta,
                        const CIMethod& method);

struct ContainmentRow {
    std::uint64_t run_id = 0;
    std::uint32_t k = 0;
    std::uint32_t x = 0;
    bool in_support = false;
    bool omega_valid = false;
    bool pass = true;
    double refined_width = 0.0;
    double sci_width = 0.0;
};

struct ContainmentReport {
    bool omega_valid = false;
    std::vector<ContainmentRow> rows;
    std::size_t failures = 0;
};

// Run-conditional containment check of the refined sets against the
// deterministic pooled surrogates: support symbols against the surrogate
// interval of the pooled sample, off-support symbols against the one-sided
// surrogate bound at the relevant pooled size. Rows are emitted for every
// (k, x); assertions apply only when the run is valid.
ContainmentReport check_theorem_containment(const RefinedTable& refined,
                                            const ProblemInstance& instance,
                                            const SampleTable& samples, double delta,
                                            const CIMethod& method, std::uint64_t run_id = 0);

std::string containment_csv_header();
std::string containment_csv_row(const ContainmentRow& row);

struct RateSweepResult {
    std::vector<std::int64_t> sample_sizes;
    std::vector<double> mean_support_width;
    std::vector<double> mean_offsupport_width;
    double support_slope = 0.0;
    double offsupport_slope = 0.0;
};

// Mean refined widths as the common sample size grows, with log-log slope
// fits for the support and off-support regions.
RateSweepResult rate_sweep(const std::vector<double>& q, std::size_t family_size,
                           const std::vector<std::int64_t>& size_grid, double delta,
                           const CIMethod& method, std::int64_t max_clique, std::uint64_t seed,
                           std::size_t replications);

} // namespace permeq
