#pragma once

namespace hwx {

/// Closed interval [lo, hi]; a point when lo == hi.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double midpoint() const { return lo + 0.5 * (hi - lo); }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool is_point() const { return lo == hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace hwx
