#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <vector>

#include "hwx/error.hpp"
#include "hwx/jets.hpp"
#include "hwx/poly.hpp"
#include "hwx/quadrature.hpp"

namespace hwx {

namespace detail {

inline constexpr int max_bump_order = max_jet_order + 2;
inline constexpr double bump_edge_guard = 1e-8;

// D^i phi = P_i(x) / (1 - x^2)^{2i} * phi(x), with
// P_{i+1} = P_i' (1 - x^2)^2 + 4 i x P_i (1 - x^2) - 2 x P_i.
inline const std::vector<Poly>& bump_numerators() {
    static const std::vector<Poly> table = [] {
        std::vector<Poly> P{Poly::constant(1.0)};
        const Poly one_minus_x2({1.0, 0.0, -1.0});
        const Poly x({0.0, 1.0});
        for (int i = 0; i < max_bump_order; ++i) {
            const Poly& p = P.back();
            P.push_back(p.derivative() * one_minus_x2 * one_minus_x2 +
                        (4.0 * i) * (x * p * one_minus_x2) - 2.0 * (x * p));
        }
        return P;
    }();
    return table;
}

}  // namespace detail

/// D^i of phi(x) = exp(-1/(1 - x^2)) on (-1, 1), 0 elsewhere. Exactly 0 once
/// |x| >= 1 - 1e-8, where every derivative has long underflowed.
inline double bump_derivative(int i, double x) {
    if (i < 0) throw DomainError("bump_derivative: negative order");
    if (i > detail::max_bump_order) throw DomainError("bump_derivative: order too large");
    if (!(std::abs(x) < 1.0 - detail::bump_edge_guard)) return 0.0;
    const double u = (1.0 - x) * (1.0 + x);
    const double p = detail::bump_numerators()[static_cast<std::size_t>(i)](x);
    return p * std::exp(-1.0 / u - 2.0 * i * std::log(u));
}

/// sup |D^i phi| over the line, from a dense scan of [0, 1) refined around
/// the best sample. D^i phi is even or odd, so half the line suffices.
inline double bump_sup_norm(int i) {
    if (i < 0 || i > detail::max_bump_order) throw DomainError("bump_sup_norm: order out of range");
    static std::array<double, detail::max_bump_order + 1> cache{};
    static std::array<bool, detail::max_bump_order + 1> ready{};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const auto k = static_cast<std::size_t>(i);
    if (!ready[k]) {
        constexpr int n = 200000;
        double best = 0.0, arg = 0.0;
        for (int j = 0; j < n; ++j) {
            const double x = static_cast<double>(j) / n;
            const double v = std::abs(bump_derivative(i, x));
            if (v > best) best = v, arg = x;
        }
        double h = 1.0 / n;
        for (int round = 0; round < 3; ++round) {
            const double lo = std::max(0.0, arg - h);
            for (int j = 0; j <= 1000; ++j) {
                const double x = lo + 2.0 * h * j / 1000.0;
                const double v = std::abs(bump_derivative(i, x));
                if (v > best) best = v, arg = x;
            }
            h /= 500.0;
        }
        cache[k] = best;
        ready[k] = true;
    }
    return cache[k];
}

namespace detail {

// Cumulative integral of phi on [-1, 0] over a uniform grid, 20-point
// Gauss-Legendre per cell; the right half follows from symmetry.
struct BumpCumulative {
    static constexpr int cells = 2048;
    std::array<double, cells + 1> left{};
    double half_mass = 0.0;

    BumpCumulative() {
        CompensatedSum s;
        left[0] = 0.0;
        for (int j = 0; j < cells; ++j) {
            const double l = -1.0 + static_cast<double>(j) / cells;
            const double r = -1.0 + static_cast<double>(j + 1) / cells;
            s += gauss_legendre([](double x) { return bump_derivative(0, x); }, l, r);
            left[static_cast<std::size_t>(j) + 1] = s.value();
        }
        half_mass = left[cells];
    }

    // int_{-1}^{s} phi for s <= 0
    double lower(double s) const {
        if (s <= -1.0) return 0.0;
        const double pos = (s + 1.0) * cells;
        int j = static_cast<int>(pos);
        if (j >= cells) return half_mass;
        // Integrate from the nearer grid node, so the panel is at most half a cell.
        auto phi = [](double x) { return bump_derivative(0, x); };
        const double l = -1.0 + static_cast<double>(j) / cells;
        if (pos - j <= 0.5) return left[static_cast<std::size_t>(j)] + gauss_legendre_short(phi, l, s);
        const double r = -1.0 + static_cast<double>(j + 1) / cells;
        return left[static_cast<std::size_t>(j) + 1] - gauss_legendre_short(phi, s, r);
    }
};

inline const BumpCumulative& bump_cumulative() {
    static const BumpCumulative table;
    return table;
}

}  // namespace detail

/// int_{-1}^{1} phi.
inline double bump_mass() { return 2.0 * detail::bump_cumulative().half_mass; }

/// int_{-1}^{s} phi; exactly 0 for s <= -1 and exactly bump_mass() for s >= 1.
inline double bump_integral(double s) {
    const auto& c = detail::bump_cumulative();
    if (s <= 0.0) return c.lower(s);
    return 2.0 * c.half_mass - c.lower(-s);
}

/// 1 - int_{-1}^{s} phi / mass, computed without cancellation near s = 1.
inline double bump_tail_fraction(double s) {
    const auto& c = detail::bump_cumulative();
    const double mass = 2.0 * c.half_mass;
    if (s >= 0.0) return c.lower(-s) / mass;
    return (mass - c.lower(s)) / mass;
}

}  // namespace hwx
