#pragma once

#include <cstdint>
#include <string>

namespace permeq {

// Summary of the indicator sample of one symbol: number of hits and total
// sample size.
struct BernoulliSample {
    std::int64_t ones = 0;
    std::int64_t n = 0;
};

// Empirical mean ones/n. Throws std::invalid_argument when n < 1 or the
// counts are inconsistent.
double empirical_mean(const BernoulliSample& s);

// Binary KL divergence KL(u,v) = u log(u/v) + (1-u) log((1-u)/(1-v)) with the
// conventions 0 log(0/.) = 0. Returns +inf iff (v=0, u>0) or (v=1, u<1).
// Throws std::domain_error outside [0,1]^2.
double kl_bernoulli(double u, double v);

// Closed subinterval of [0,1], possibly empty. Emptiness is a distinguished
// state; lo > hi is never representable.
class Interval {
public:
    Interval() : lo_(0.0), hi_(0.0), empty_(true) {}
    static Interval closed(double lo, double hi);
    static Interval empty();

    bool is_empty() const { return empty_; }
    double lo() const;
    double hi() const;
    double width() const { return empty_ ? 0.0 : hi_ - lo_; }
    bool contains(double x) const { return !empty_ && lo_ <= x && x <= hi_; }
    bool intersects(const Interval& o) const;
    Interval intersect(const Interval& o) const;

    bool operator==(const Interval& o) const;

private:
    double lo_, hi_;
    bool empty_;
};

enum class CIFamily {
    Hoeffding,
    Bernstein,
    EmpiricalBernstein,
    KL,
    TimeUniformSubGaussian,
    TimeUniformBernstein,
    TimeUniformBernoulli,
};

const char* to_string(CIFamily f);
CIFamily ci_family_from_string(const std::string& name);

// Confidence-interval constructor selection. alphabet_size enters through the
// union-bound factor 2|X|/delta of the per-symbol bounds; eta is the peeling
// parameter of the KL and time-uniform Bernstein thresholds; sigma is the
// sub-Gaussian parameter of the Hoeffding and time-uniform sub-Gaussian
// bounds (1/2 covers any [0,1]-bounded variable).
struct CIMethod {
    CIFamily family = CIFamily::Bernstein;
    int alphabet_size = 1;
    double eta = 2.0;
    double sigma = 0.5;
};

// Peeling threshold f_eta(delta, n) = eta * log(log(n) log(eta n) / (delta log^2 eta)),
// with the inner ratio clamped below at e so that n = 1 yields eta instead of
// -inf. Throws std::domain_error for eta <= 1 or delta outside (0,1).
double peeling_threshold(double delta, std::int64_t n, double eta);

// Optimal sub-Gaussian variance proxy of a Bernoulli(mu) variable,
// (1/2 - mu) / log(1/mu - 1), extended by its limits: 1/4 within 1e-9 of
// mu = 1/2 and 0 at mu in {0, 1}.
double bernoulli_variance_proxy(double mu);

// One-sided refinement of the proxy for the upper tail: equals the two-sided
// proxy below 1/2 and mu(1-mu) above.
double bernoulli_variance_proxy_upper(double mu);

// Time-uniform deviation radius from the method of mixtures,
// sqrt( (1/2n)(1 + 1/n) log(sqrt(n+1)/delta) ).
double time_uniform_radius(std::int64_t n, double delta);

// Deviation bound b(lambda, S, delta) of the selected constructor, evaluated
// at a candidate mean lambda. For symmetric constructors this is the
// half-width; for the time-uniform Bernoulli bound it is the radius allowed
// above the empirical mean (the bound is asymmetric, see
// confidence_set_contains). For the KL constructor it is the divergence
// threshold rather than a distance.
double deviation_bound(const CIMethod& method, double lambda, const BernoulliSample& s,
                       double delta);

// Membership test lambda in CI(S, delta) evaluated directly from the defining
// inequality, without endpoint computation.
bool confidence_set_contains(const CIMethod& method, const BernoulliSample& s, double delta,
                             double lambda);

// The set {lambda in [0,1] : d(phat, lambda) <= b(lambda, S, delta)} clamped
// to [0,1]. Constructors whose bound depends on lambda are inverted by
// bisection to absolute tolerance 1e-10 with endpoints rounded outward, so
// the returned interval always over-covers the exact set.
Interval confidence_interval(const BernoulliSample& s, double delta, const CIMethod& method);

// Deterministic surrogate half-width B(p, n, delta) that contains the
// data-dependent interval of the same constructor. Throws
// std::invalid_argument for the time-uniform constructors, which have no
// surrogate form.
double surrogate_halfwidth(const CIMethod& method, double p, std::int64_t n, double delta);

} // namespace permeq
