#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hwx/error.hpp"

namespace hwx {

/// A concave modulus of continuity omega: [0, T] -> [0, inf) with omega(0) = 0.
///
/// The base shape is one of a small set of kinds; `power(omega, alpha)` wraps
/// any base with an outer exponent, so omega^alpha stays exactly representable.
class Modulus {
public:
    enum class Kind { power, linear, log_lipschitz, piecewise };
    using Knot = std::pair<double, double>;

    static Modulus linear() { return Modulus(Kind::linear); }

    /// t^alpha for alpha in (0, 1].
    static Modulus power_law(double alpha) {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw DomainError("power modulus exponent must lie in (0, 1]");
        Modulus w(Kind::power);
        w.alpha_ = alpha;
        return w;
    }

    /// t (1 + ln(1/t)) on (0, 1), held at 1 for t >= 1 so it stays concave.
    static Modulus log_lipschitz() { return Modulus(Kind::log_lipschitz); }

    /// Linear interpolation through knots, continued past the last knot with
    /// the last slope. The first knot must be (0, 0).
    static Modulus piecewise(std::vector<Knot> knots) {
        if (knots.size() < 2) throw DomainError("piecewise modulus needs at least two knots");
        if (knots.front().first != 0.0 || knots.front().second != 0.0)
            throw DomainError("piecewise modulus must start at the knot (0, 0)");
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i].first > knots[i - 1].first))
                throw DomainError("piecewise modulus knots must have increasing t");
            if (!std::isfinite(knots[i].second) || knots[i].second < 0.0)
                throw DomainError("piecewise modulus values must be finite and nonnegative");
        }
        Modulus w(Kind::piecewise);
        w.knots_ = std::move(knots);
        return w;
    }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double exponent() const { return exponent_; }
    const std::vector<Knot>& knots() const { return knots_; }

    double operator()(double t) const {
        if (!(t >= 0.0)) throw DomainError("modulus evaluated at negative t");
        if (t == 0.0) return 0.0;
        const double base = eval_base(t);
        return exponent_ == 1.0 ? base : std::pow(base, exponent_);
    }

    std::string name() const {
        std::string s;
        switch (kind_) {
            case Kind::linear: s = "linear"; break;
            case Kind::power: s = "power(" + std::to_string(alpha_) + ")"; break;
            case Kind::log_lipschitz: s = "log_lipschitz"; break;
            case Kind::piecewise: s = "piecewise"; break;
        }
        if (exponent_ != 1.0) s += "^" + std::to_string(exponent_);
        return s;
    }

    friend Modulus power(const Modulus& omega, double alpha);

private:
    explicit Modulus(Kind k) : kind_(k) {}

    double eval_base(double t) const {
        switch (kind_) {
            case Kind::linear: return t;
            case Kind::power: return std::pow(t, alpha_);
            case Kind::log_lipschitz: return t < 1.0 ? t * (1.0 - std::log(t)) : 1.0;
            case Kind::piecewise: {
                auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                           [](double v, const Knot& k) { return v < k.first; });
                if (it == knots_.end()) it = std::prev(knots_.end());
                const Knot& hi = *it;
                const Knot& lo = *std::prev(it);
                const double slope = (hi.second - lo.second) / (hi.first - lo.first);
                return lo.second + slope * (t - lo.first);
            }
        }
        return 0.0;
    }

    Kind kind_;
    double alpha_ = 1.0;
    double exponent_ = 1.0;
    std::vector<Knot> knots_;
};

/// t -> omega(t)^alpha. Concavity is preserved only for alpha in (0, 1].
inline Modulus power(const Modulus& omega, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("modulus power exponent must lie in (0, 1]");
    Modulus w = omega;
    w.exponent_ *= alpha;
    return w;
}

struct ModulusCheck {
    bool pass = true;
    double worst = 0.0;            // magnitude of the worst violation (0 when passing)
    std::vector<double> witness;  // offending pair or triple of grid points
};

struct ModulusReport {
    ModulusCheck monotone;
    ModulusCheck concave;
    ModulusCheck ratio_nonincreasing;  // omega(t)/t
    bool pass() const { return monotone.pass && concave.pass && ratio_nonincreasing.pass; }
};

/// Certify monotonicity, concavity and the decrease of omega(t)/t on a sorted
/// grid of nonnegative points, with tolerance `tol` relative to the slopes.
inline ModulusReport validate(const Modulus& omega, std::span<const double> grid,
                              double tol = 1e-12) {
    if (grid.empty()) throw DomainError("modulus validation grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw DomainError("modulus validation grid has a negative entry");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError("modulus validation grid must be strictly increasing");
    }
    ModulusReport r;
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = omega(grid[i]);

    auto record = [](ModulusCheck& c, double violation, std::vector<double> witness) {
        if (violation > c.worst) {
            c.pass = false;
            c.worst = violation;
            c.witness = std::move(witness);
        }
    };

    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double drop = w[i - 1] - w[i];
        if (drop > tol * std::max(1.0, std::abs(w[i]))) record(r.monotone, drop, {grid[i - 1], grid[i]});
        if (grid[i - 1] > 0.0) {
            const double q0 = w[i - 1] / grid[i - 1];
            const double q1 = w[i] / grid[i];
            const double rise = q1 - q0;
            if (rise > tol * std::max(1.0, std::abs(q0)))
                record(r.ratio_nonincreasing, rise, {grid[i - 1], grid[i]});
        }
    }
    for (std::size_t i = 2; i < grid.size(); ++i) {
        const double s0 = (w[i - 1] - w[i - 2]) / (grid[i - 1] - grid[i - 2]);
        const double s1 = (w[i] - w[i - 1]) / (grid[i] - grid[i - 1]);
        const double rise = s1 - s0;
        if (rise > tol * std::max({1.0, std::abs(s0), std::abs(s1)}))
            record(r.concave, rise, {grid[i - 2], grid[i - 1], grid[i]});
    }
    return r;
}

/// `n` geometrically spaced points spanning [t_min, t_max].
inline std::vector<double> default_modulus_grid(double t_max, std::size_t n = 512,
                                                double t_min = 1e-9) {
    if (!(t_max > t_min) || n < 2) throw DomainError("modulus grid needs t_max > t_min and n >= 2");
    std::vector<double> g(n);
    const double ratio = std::log(t_max / t_min) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = t_min * std::exp(ratio * static_cast<double>(i));
    g.back() = t_max;
    return g;
}

}  // namespace hwx
