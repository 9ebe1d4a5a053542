#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "permeq/interval_union.hpp"
#include "permeq/rng.hpp"

using namespace permeq;

namespace {

IntervalUnion random_union(SplitMix64& rng) {
    std::vector<Interval> parts;
    const int count = 1 + static_cast<int>(rng.next() % 4);
    for (int i = 0; i < count; ++i) {
        double a = rng.next_double();
        double b = rng.next_double();
        if (a > b) std::swap(a, b);
        parts.push_back(Interval::closed(a, b));
    }
    return IntervalUnion::from_intervals(std::move(parts));
}

} // namespace

TEST_CASE("interval basics") {
    const Interval iv = Interval::closed(0.2, 0.5);
    CHECK(iv.width() == doctest::Approx(0.3));
    CHECK(iv.contains(0.2));
    CHECK(iv.contains(0.5));
    CHECK(!iv.contains(0.51));
    CHECK(Interval::empty().is_empty());
    CHECK(Interval::empty().width() == 0.0);
    CHECK_THROWS_AS(Interval::closed(0.5, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(Interval::closed(-0.1, 0.2), std::invalid_argument);
    CHECK(Interval::closed(0.0, 0.3).intersects(Interval::closed(0.3, 0.8)));
    CHECK(!Interval::closed(0.0, 0.29).intersects(Interval::closed(0.3, 0.8)));
    CHECK(Interval::closed(0.1, 0.6).intersect(Interval::closed(0.4, 0.9)) ==
          Interval::closed(0.4, 0.6));
}

TEST_CASE("measure adds component widths") {
    const IntervalUnion u = IntervalUnion::from_intervals(
        {Interval::closed(0.1, 0.3), Interval::closed(0.5, 0.6)});
    CHECK(u.measure() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(u.components().size() == 2);
}

TEST_CASE("touching components merge") {
    const IntervalUnion u = IntervalUnion::from_intervals(
        {Interval::closed(0.1, 0.3), Interval::closed(0.3, 0.4), Interval::closed(0.45, 0.5)});
    CHECK(u.components().size() == 2);
    CHECK(u.components()[0] == Interval::closed(0.1, 0.4));
    CHECK(u.hull() == Interval::closed(0.1, 0.5));
    CHECK(u.contains(0.3));
    CHECK(!u.contains(0.42));
}

TEST_CASE("intersection with the full interval is the identity") {
    SplitMix64 rng(11);
    const IntervalUnion full(Interval::closed(0.0, 1.0));
    for (int i = 0; i < 100; ++i) {
        const IntervalUnion u = random_union(rng);
        CHECK(intersect(u, full) == u);
        CHECK(unite(u, IntervalUnion()) == u);
    }
}

TEST_CASE("measure is monotone under intersection and union") {
    SplitMix64 rng(12);
    for (int i = 0; i < 200; ++i) {
        const IntervalUnion u = random_union(rng);
        const IntervalUnion v = random_union(rng);
        const IntervalUnion meet = intersect(u, v);
        const IntervalUnion join = unite(u, v);
        CHECK(meet.measure() <= std::min(u.measure(), v.measure()) + 1e-12);
        CHECK(join.measure() >= std::max(u.measure(), v.measure()) - 1e-12);
        CHECK(join.measure() <= u.measure() + v.measure() + 1e-12);
        // Inclusion-exclusion for unions of intervals.
        CHECK(join.measure() + meet.measure() ==
              doctest::Approx(u.measure() + v.measure()).epsilon(1e-9));
        // Components stay disjoint with positive gaps.
        const auto& parts = join.components();
        for (std::size_t c = 1; c < parts.size(); ++c)
            CHECK(parts[c].lo() > parts[c - 1].hi());
    }
}

TEST_CASE("intersection distributes over membership") {
    SplitMix64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const IntervalUnion u = random_union(rng);
        const IntervalUnion v = random_union(rng);
        const IntervalUnion meet = intersect(u, v);
        for (int probe = 0; probe < 50; ++probe) {
            const double x = rng.next_double();
            CHECK(meet.contains(x) == (u.contains(x) && v.contains(x)));
        }
    }
}

TEST_CASE("hull spans the extreme endpoints") {
    const IntervalUnion u = IntervalUnion::from_intervals(
        {Interval::closed(0.6, 0.7), Interval::closed(0.05, 0.1)});
    CHECK(convex_hull(u) == Interval::closed(0.05, 0.7));
    CHECK(measure(u) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(convex_hull(IntervalUnion()).is_empty());
}
