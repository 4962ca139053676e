#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hwx/error.hpp"
#include "hwx/interval.hpp"

namespace hwx {

/// A compact subset of the line given as finitely many closed components,
/// sorted and separated by positive gaps. Points are degenerate components.
class CompactSet {
public:
    CompactSet() = default;

    explicit CompactSet(std::vector<Interval> components) : components_(std::move(components)) {
        if (components_.empty()) throw DomainError("compact set needs at least one component");
        for (std::size_t i = 0; i < components_.size(); ++i) {
            const Interval& c = components_[i];
            if (!std::isfinite(c.lo) || !std::isfinite(c.hi))
                throw DomainError("compact set component has a non-finite endpoint");
            if (c.lo > c.hi) throw DomainError("compact set component has lo > hi");
            if (i > 0 && !(c.lo > components_[i - 1].hi))
                throw DomainError("compact set components must be sorted with positive separation (component " +
                                  std::to_string(i) + ")");
        }
    }

    const std::vector<Interval>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    const Interval& operator[](std::size_t i) const { return components_[i]; }

    /// Open complementary intervals of the hull, as (right end of component i, left end of i + 1).
    std::vector<Interval> gaps() const {
        std::vector<Interval> g;
        for (std::size_t i = 0; i + 1 < components_.size(); ++i)
            g.push_back({components_[i].hi, components_[i + 1].lo});
        return g;
    }

    Interval hull() const {
        if (components_.empty()) return {};
        return {components_.front().lo, components_.back().hi};
    }
    double diameter() const { return hull().length(); }

    std::optional<std::size_t> component_of(double x) const {
        auto it = std::upper_bound(components_.begin(), components_.end(), x,
                                   [](double v, const Interval& c) { return v < c.lo; });
        if (it == components_.begin()) return std::nullopt;
        --it;
        if (!it->contains(x)) return std::nullopt;
        return static_cast<std::size_t>(it - components_.begin());
    }
    bool contains(double x) const { return component_of(x).has_value(); }

    /// Index of the gap containing x in its interior, if any.
    std::optional<std::size_t> gap_of(double x) const {
        auto it = std::upper_bound(components_.begin(), components_.end(), x,
                                   [](double v, const Interval& c) { return v < c.lo; });
        if (it == components_.begin() || it == components_.end()) return std::nullopt;
        const auto i = static_cast<std::size_t>(it - components_.begin()) - 1;
        if (x > components_[i].hi) return i;
        return std::nullopt;
    }

    /// Component endpoints, ascending; a point component contributes once.
    std::vector<double> endpoints() const {
        std::vector<double> e;
        for (const Interval& c : components_) {
            e.push_back(c.lo);
            if (!c.is_point()) e.push_back(c.hi);
        }
        return e;
    }

private:
    std::vector<Interval> components_;
};

}  // namespace hwx
