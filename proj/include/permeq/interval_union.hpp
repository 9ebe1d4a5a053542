#pragma once

#include <vector>

#include "permeq/stats.hpp"

namespace permeq {

// Finite union of disjoint, non-touching closed subintervals of [0,1],
// ordered by lower endpoint. Touching or overlapping components are merged on
// construction, so gaps between stored components are strictly positive.
class IntervalUnion {
public:
    IntervalUnion() = default;
    explicit IntervalUnion(const Interval& iv);
    static IntervalUnion from_intervals(std::vector<Interval> parts);

    bool is_empty() const { return parts_.empty(); }
    const std::vector<Interval>& components() const { return parts_; }

    double measure() const;
    Interval hull() const;
    bool contains(double x) const;

    bool operator==(const IntervalUnion& o) const { return parts_ == o.parts_; }

private:
    std::vector<Interval> parts_;
};

IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b);
IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b);
IntervalUnion intersect(const IntervalUnion& a, const Interval& b);
double measure(const IntervalUnion& u);
Interval convex_hull(const IntervalUnion& u);

} // namespace permeq
