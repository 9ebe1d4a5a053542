#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace permeq {

// Counter-based 64-bit generator (SplitMix64). The i-th draw from seed s is
// mix(s + (i+1)*GAMMA), so streams are cheap to fork and identical across
// platforms. This is the single generator used by every experiment;
// replication r of a command runs on seed base_seed + r.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Independent substream; deterministic function of (seed, tag).
    SplitMix64 split(std::uint64_t tag) const {
        SplitMix64 mixer(state_ ^ (0xD1B54A32D192ED03ULL * (tag + 1)));
        return SplitMix64(mixer.next());
    }

private:
    std::uint64_t state_;
};

// Exact binomial draw by CDF inversion. Small cases invert from zero; once
// (1-p)^n would underflow, the inversion enumerates outward from the mode,
// where the mass is always representable, so draws stay exact for any n.
inline std::int64_t binomial_draw(std::int64_t n, double p, SplitMix64& rng) {
    if (n <= 0) return 0;
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial_draw(n, 1.0 - p, rng);

    const double u = rng.next_double();
    const double q = 1.0 - p;
    const double ratio = p / q;
    const double nd = static_cast<double>(n);

    if (nd * std::log(q) > -700.0) {
        double pmf = std::exp(nd * std::log(q));
        double cdf = pmf;
        std::int64_t k = 0;
        while (u > cdf && k < n) {
            pmf *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
            cdf += pmf;
            ++k;
            if (pmf <= 0.0) break;
        }
        return k;
    }

    // Mode-centered inversion: enumerate k0, k0+1, k0-1, k0+2, ... and stop
    // once the accumulated mass passes u. Any fixed enumeration order yields
    // an exact draw; this one needs O(sqrt(n p q)) steps typically.
    const std::int64_t k0 =
        std::min<std::int64_t>(n, static_cast<std::int64_t>((nd + 1.0) * p));
    const double k0d = static_cast<double>(k0);
    const double log_pmf0 = std::lgamma(nd + 1.0) - std::lgamma(k0d + 1.0) -
                            std::lgamma(nd - k0d + 1.0) + k0d * std::log(p) +
                            (nd - k0d) * std::log(q);
    const double pmf0 = std::exp(log_pmf0);
    double cum = pmf0;
    double pmf_hi = pmf0, pmf_lo = pmf0;
    std::int64_t hi = k0, lo = k0;
    std::int64_t last = k0;
    while (u > cum && (hi < n || lo > 0)) {
        if (hi < n) {
            pmf_hi *= ratio * static_cast<double>(n - hi) / static_cast<double>(hi + 1);
            ++hi;
            cum += pmf_hi;
            last = hi;
            if (u <= cum) break;
        }
        if (lo > 0) {
            pmf_lo *= static_cast<double>(lo) / (ratio * static_cast<double>(n - lo + 1));
            --lo;
            cum += pmf_lo;
            last = lo;
        }
        if (pmf_hi <= 0.0 && pmf_lo <= 0.0) break;
    }
    return last;
}

// One draw from a finite distribution given its cumulative sums.
inline std::uint32_t discrete_draw(const std::vector<double>& cumulative, SplitMix64& rng) {
    const double u = rng.next_double();
    std::uint32_t lo = 0;
    std::uint32_t hi = static_cast<std::uint32_t>(cumulative.size()) - 1;
    while (lo < hi) {
        const std::uint32_t mid = (lo + hi) / 2;
        if (u < cumulative[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

} // namespace permeq
