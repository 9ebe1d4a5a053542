#include "permeq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace permeq {

namespace {

constexpr double kBisectionTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void require_sample(const BernoulliSample& s) {
    if (s.n < 1) throw std::invalid_argument("BernoulliSample: sample size must be >= 1");
    if (s.ones < 0 || s.ones > s.n)
        throw std::invalid_argument("BernoulliSample: ones must lie in [0, n]");
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
}

void require_method(const CIMethod& m) {
    if (m.alphabet_size < 1) throw std::invalid_argument("alphabet_size must be >= 1");
    if ((m.family == CIFamily::KL || m.family == CIFamily::TimeUniformBernstein) && !(m.eta > 1.0))
        throw std::domain_error("peeling parameter eta must exceed 1");
    if ((m.family == CIFamily::Hoeffding || m.family == CIFamily::TimeUniformSubGaussian) &&
        !(m.sigma > 0.0))
        throw std::domain_error("sub-Gaussian sigma must be positive");
}

// log(2|X|/delta), the per-symbol union-bound factor.
double union_log(const CIMethod& m, double delta) {
    return std::log(2.0 * static_cast<double>(m.alphabet_size) / delta);
}

// Unbiased empirical variance of a Bernoulli sample; falls back to the plug-in
// variance when n = 1 (where the unbiased form is undefined).
double empirical_variance(const BernoulliSample& s) {
    const double phat = static_cast<double>(s.ones) / static_cast<double>(s.n);
    const double v = phat * (1.0 - phat);
    if (s.n >= 2) return v * static_cast<double>(s.n) / static_cast<double>(s.n - 1);
    return v;
}

} // namespace

double empirical_mean(const BernoulliSample& s) {
    require_sample(s);
    return static_cast<double>(s.ones) / static_cast<double>(s.n);
}

double kl_bernoulli(double u, double v) {
    if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0))
        throw std::domain_error("kl_bernoulli arguments must lie in [0,1]");
    double total = 0.0;
    if (u > 0.0) {
        if (v == 0.0) return kInf;
        total += u * std::log(u / v);
    }
    if (u < 1.0) {
        if (v == 1.0) return kInf;
        total += (1.0 - u) * std::log((1.0 - u) / (1.0 - v));
    }
    return std::max(0.0, total);
}

Interval Interval::closed(double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
        throw std::invalid_argument("Interval: need 0 <= lo <= hi <= 1");
    Interval out;
    out.lo_ = lo;
    out.hi_ = hi;
    out.empty_ = false;
    return out;
}

Interval Interval::empty() { return Interval(); }

double Interval::lo() const {
    if (empty_) throw std::logic_error("Interval: lo() on empty interval");
    return lo_;
}

double Interval::hi() const {
    if (empty_) throw std::logic_error("Interval: hi() on empty interval");
    return hi_;
}

bool Interval::intersects(const Interval& o) const {
    if (empty_ || o.empty_) return false;
    return std::max(lo_, o.lo_) <= std::min(hi_, o.hi_);
}

Interval Interval::intersect(const Interval& o) const {
    if (!intersects(o)) return Interval::empty();
    return Interval::closed(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
}

bool Interval::operator==(const Interval& o) const {
    if (empty_ != o.empty_) return false;
    if (empty_) return true;
    return lo_ == o.lo_ && hi_ == o.hi_;
}

const char* to_string(CIFamily f) {
    switch (f) {
        case CIFamily::Hoeffding: return "hoeffding";
        case CIFamily::Bernstein: return "bernstein";
        case CIFamily::EmpiricalBernstein: return "empirical-bernstein";
        case CIFamily::KL: return "kl";
        case CIFamily::TimeUniformSubGaussian: return "time-uniform-subgaussian";
        case CIFamily::TimeUniformBernstein: return "time-uniform-bernstein";
        case CIFamily::TimeUniformBernoulli: return "time-uniform-bernoulli";
    }
    return "unknown";
}

CIFamily ci_family_from_string(const std::string& name) {
    if (name == "hoeffding") return CIFamily::Hoeffding;
    if (name == "bernstein") return CIFamily::Bernstein;
    if (name == "empirical-bernstein") return CIFamily::EmpiricalBernstein;
    if (name == "kl") return CIFamily::KL;
    if (name == "time-uniform-subgaussian") return CIFamily::TimeUniformSubGaussian;
    if (name == "time-uniform-bernstein") return CIFamily::TimeUniformBernstein;
    if (name == "time-uniform-bernoulli") return CIFamily::TimeUniformBernoulli;
    throw std::invalid_argument("unknown confidence-interval family: " + name);
}

double peeling_threshold(double delta, std::int64_t n, double eta) {
    require_delta(delta);
    if (!(eta > 1.0)) throw std::domain_error("peeling parameter eta must exceed 1");
    if (n < 1) throw std::invalid_argument("peeling_threshold: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double log_eta = std::log(eta);
    double ratio = std::log(nd) * std::log(eta * nd) / (delta * log_eta * log_eta);
    // Clamp below at e so the threshold stays finite (and >= eta) at n = 1.
    ratio = std::max(ratio, std::exp(1.0));
    return eta * std::log(ratio);
}

double bernoulli_variance_proxy(double mu) {
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::domain_error("bernoulli_variance_proxy: mu must lie in [0,1]");
    if (mu == 0.0 || mu == 1.0) return 0.0;
    if (std::abs(mu - 0.5) < 1e-9) return 0.25;
    return (0.5 - mu) / std::log(1.0 / mu - 1.0);
}

double bernoulli_variance_proxy_upper(double mu) {
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::domain_error("bernoulli_variance_proxy_upper: mu must lie in [0,1]");
    if (mu < 0.5) return bernoulli_variance_proxy(mu);
    return mu * (1.0 - mu);
}

double time_uniform_radius(std::int64_t n, double delta) {
    require_delta(delta);
    if (n < 1) throw std::invalid_argument("time_uniform_radius: n must be >= 1");
    const double nd = static_cast<double>(n);
    return std::sqrt((1.0 / (2.0 * nd)) * (1.0 + 1.0 / nd) *
                     std::log(std::sqrt(nd + 1.0) / delta));
}

double deviation_bound(const CIMethod& m, double lambda, const BernoulliSample& s, double delta) {
    require_sample(s);
    require_delta(delta);
    require_method(m);
    const double nd = static_cast<double>(s.n);
    switch (m.family) {
        case CIFamily::Hoeffding:
            return std::sqrt(2.0 * m.sigma * m.sigma * union_log(m, delta) / nd);
        case CIFamily::Bernstein: {
            const double zeta = union_log(m, delta) / nd;
            return std::sqrt(2.0 * lambda * (1.0 - lambda) * zeta) + zeta / 3.0;
        }
        case CIFamily::EmpiricalBernstein: {
            const double zeta = union_log(m, delta) / nd;
            return std::sqrt(2.0 * empirical_variance(s) * zeta) + 7.0 * zeta / 3.0;
        }
        case CIFamily::KL:
            return peeling_threshold(delta, s.n, m.eta) / nd;
        case CIFamily::TimeUniformSubGaussian:
            return 2.0 * m.sigma * time_uniform_radius(s.n, delta);
        case CIFamily::TimeUniformBernstein: {
            const double alpha = peeling_threshold(delta, s.n, m.eta);
            return std::sqrt(2.0 * lambda * (1.0 - lambda) * alpha / nd) + alpha / (3.0 * nd);
        }
        case CIFamily::TimeUniformBernoulli:
            return 2.0 * std::sqrt(bernoulli_variance_proxy(lambda)) *
                   time_uniform_radius(s.n, delta);
    }
    throw std::logic_error("deviation_bound: unhandled family");
}

bool confidence_set_contains(const CIMethod& m, const BernoulliSample& s, double delta,
                             double lambda) {
    require_sample(s);
    require_delta(delta);
    require_method(m);
    if (!(lambda >= 0.0 && lambda <= 1.0)) return false;
    const double phat = static_cast<double>(s.ones) / static_cast<double>(s.n);
    switch (m.family) {
        case CIFamily::KL:
            return kl_bernoulli(phat, lambda) <= deviation_bound(m, lambda, s, delta);
        case CIFamily::TimeUniformBernoulli: {
            const double radius = time_uniform_radius(s.n, delta);
            const double up = 2.0 * std::sqrt(bernoulli_variance_proxy_upper(lambda)) * radius;
            const double down = 2.0 * std::sqrt(bernoulli_variance_proxy(lambda)) * radius;
            // "phat deviates upward from lambda by at most the one-sided proxy,
            // downward by at most the two-sided one".
            return phat - lambda <= up && lambda - phat <= down;
        }
        default:
            return std::abs(phat - lambda) <= deviation_bound(m, lambda, s, delta);
    }
}

namespace {

// Endpoint searches. The membership region always contains phat; bisection
// maintains an inside point and an outside point and returns the outside
// bracket end, so the result over-covers by at most the tolerance.

template <typename Member>
double upper_endpoint(double phat, Member member, double tol = kBisectionTol) {
    if (member(1.0)) return 1.0;
    double inside = phat;
    double outside = 1.0;
    while (outside - inside > tol) {
        const double mid = 0.5 * (inside + outside);
        if (mid <= inside || mid >= outside) break;
        if (member(mid)) inside = mid; else outside = mid;
    }
    return outside;
}

template <typename Member>
double lower_endpoint(double phat, Member member, double tol = kBisectionTol) {
    if (member(0.0)) return 0.0;
    double outside = 0.0;
    double inside = phat;
    while (inside - outside > tol) {
        const double mid = 0.5 * (inside + outside);
        if (mid <= outside || mid >= inside) break;
        if (member(mid)) inside = mid; else outside = mid;
    }
    return outside;
}

// Variant for the time-uniform Bernoulli bound, whose membership region is
// not provably convex near the boundary of [0,1]: a coarse scan from the
// outer end locates the outermost crossing before bisecting.
template <typename Member>
double upper_endpoint_scanned(double phat, Member member) {
    if (member(1.0)) return 1.0;
    constexpr int kScan = 2048;
    const double step = (1.0 - phat) / kScan;
    double outside = 1.0;
    double inside = phat;
    for (int i = 1; i < kScan; ++i) {
        const double x = 1.0 - static_cast<double>(i) * step;
        if (x <= phat) break;
        if (member(x)) { inside = x; break; }
        outside = x;
    }
    while (outside - inside > kBisectionTol) {
        const double mid = 0.5 * (inside + outside);
        if (member(mid)) inside = mid; else outside = mid;
    }
    return outside;
}

template <typename Member>
double lower_endpoint_scanned(double phat, Member member) {
    if (member(0.0)) return 0.0;
    constexpr int kScan = 2048;
    const double step = phat / kScan;
    double outside = 0.0;
    double inside = phat;
    for (int i = 1; i < kScan; ++i) {
        const double x = static_cast<double>(i) * step;
        if (x >= phat) break;
        if (member(x)) { inside = x; break; }
        outside = x;
    }
    while (inside - outside > kBisectionTol) {
        const double mid = 0.5 * (inside + outside);
        if (member(mid)) inside = mid; else outside = mid;
    }
    return outside;
}

} // namespace

Interval confidence_interval(const BernoulliSample& s, double delta, const CIMethod& m) {
    require_sample(s);
    require_delta(delta);
    require_method(m);
    const double phat = static_cast<double>(s.ones) / static_cast<double>(s.n);

    switch (m.family) {
        case CIFamily::Hoeffding:
        case CIFamily::EmpiricalBernstein:
        case CIFamily::TimeUniformSubGaussian: {
            const double w = deviation_bound(m, phat, s, delta);
            return Interval::closed(clamp01(phat - w), clamp01(phat + w));
        }
        case CIFamily::Bernstein:
        case CIFamily::TimeUniformBernstein: {
            auto member = [&](double lam) { return confidence_set_contains(m, s, delta, lam); };
            return Interval::closed(lower_endpoint(phat, member), upper_endpoint(phat, member));
        }
        case CIFamily::KL: {
            // The KL divergence is steep near the boundary of [0,1]; a tighter
            // location tolerance keeps the threshold residual below 1e-8 at
            // the returned endpoints.
            auto member = [&](double lam) { return confidence_set_contains(m, s, delta, lam); };
            return Interval::closed(lower_endpoint(phat, member, 1e-14),
                                    upper_endpoint(phat, member, 1e-14));
        }
        case CIFamily::TimeUniformBernoulli: {
            auto member = [&](double lam) { return confidence_set_contains(m, s, delta, lam); };
            return Interval::closed(lower_endpoint_scanned(phat, member),
                                    upper_endpoint_scanned(phat, member));
        }
    }
    throw std::logic_error("confidence_interval: unhandled family");
}

double surrogate_halfwidth(const CIMethod& m, double p, std::int64_t n, double delta) {
    require_delta(delta);
    require_method(m);
    if (n < 1) throw std::invalid_argument("surrogate_halfwidth: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("surrogate_halfwidth: p must lie in [0,1]");
    const double nd = static_cast<double>(n);
    switch (m.family) {
        case CIFamily::Hoeffding:
            // The Hoeffding bound is already lambda-free: CI and surrogate coincide.
            return std::sqrt(2.0 * m.sigma * m.sigma * union_log(m, delta) / nd);
        case CIFamily::Bernstein: {
            const double l = union_log(m, delta);
            return std::sqrt(2.0 * p * (1.0 - p) * l / nd) + 4.8 * l / nd;
        }
        case CIFamily::EmpiricalBernstein: {
            const double l = union_log(m, delta);
            return std::sqrt(2.0 * p * (1.0 - p) * l / nd) + (10.0 / 3.0) * l / nd;
        }
        case CIFamily::KL:
            return std::sqrt(peeling_threshold(delta, n, m.eta) / (2.0 * nd));
        default:
            throw std::invalid_argument(
                "surrogate_halfwidth: no surrogate form for time-uniform constructors");
    }
}

} // namespace permeq
