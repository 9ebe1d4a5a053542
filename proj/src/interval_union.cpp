#include "permeq/interval_union.hpp"

#include <algorithm>

namespace permeq {

IntervalUnion::IntervalUnion(const Interval& iv) {
    if (!iv.is_empty()) parts_.push_back(iv);
}

IntervalUnion IntervalUnion::from_intervals(std::vector<Interval> parts) {
    parts.erase(std::remove_if(parts.begin(), parts.end(),
                               [](const Interval& iv) { return iv.is_empty(); }),
                parts.end());
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
        return a.lo() < b.lo() || (a.lo() == b.lo() && a.hi() < b.hi());
    });
    IntervalUnion out;
    for (const Interval& iv : parts) {
        if (!out.parts_.empty() && iv.lo() <= out.parts_.back().hi()) {
            const Interval& last = out.parts_.back();
            out.parts_.back() = Interval::closed(last.lo(), std::max(last.hi(), iv.hi()));
        } else {
            out.parts_.push_back(iv);
        }
    }
    return out;
}

double IntervalUnion::measure() const {
    double total = 0.0;
    for (const Interval& iv : parts_) total += iv.width();
    return total;
}

Interval IntervalUnion::hull() const {
    if (parts_.empty()) return Interval::empty();
    return Interval::closed(parts_.front().lo(), parts_.back().hi());
}

bool IntervalUnion::contains(double x) const {
    for (const Interval& iv : parts_) {
        if (iv.contains(x)) return true;
        if (!iv.is_empty() && iv.lo() > x) break;
    }
    return false;
}

IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> parts = a.components();
    parts.insert(parts.end(), b.components().begin(), b.components().end());
    return IntervalUnion::from_intervals(std::move(parts));
}

IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> parts;
    std::size_t i = 0, j = 0;
    const auto& pa = a.components();
    const auto& pb = b.components();
    while (i < pa.size() && j < pb.size()) {
        const Interval piece = pa[i].intersect(pb[j]);
        if (!piece.is_empty()) parts.push_back(piece);
        if (pa[i].hi() < pb[j].hi()) ++i; else ++j;
    }
    return IntervalUnion::from_intervals(std::move(parts));
}

IntervalUnion intersect(const IntervalUnion& a, const Interval& b) {
    return intersect(a, IntervalUnion(b));
}

double measure(const IntervalUnion& u) { return u.measure(); }

Interval convex_hull(const IntervalUnion& u) { return u.hull(); }

} // namespace permeq
