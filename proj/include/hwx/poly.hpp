#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hwx/error.hpp"
#include "hwx/interval.hpp"
#include "hwx/quadrature.hpp"

namespace hwx {

/// Real univariate polynomial sum_k c_k (x - origin)^k.
///
/// Coefficients are kept in ascending order and trimmed so the leading one is
/// nonzero; the zero polynomial has no coefficients. Storing an origin lets
/// Taylor polynomials stay centered at their base point, which keeps integrals
/// over short intervals accurate. Arithmetic between polynomials with
/// different origins re-expands the right operand about the left origin.
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }
    explicit Poly(std::vector<double> coeffs, double origin = 0.0)
        : coeffs_(std::move(coeffs)), origin_(origin) {
        trim();
    }

    static Poly constant(double c, double origin = 0.0) { return Poly(std::vector<double>{c}, origin); }

    const std::vector<double>& coeffs() const { return coeffs_; }
    double origin() const { return origin_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// Degree; the zero polynomial reports 0.
    int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }

    /// Compensated Horner evaluation.
    double operator()(double x) const {
        if (coeffs_.empty()) return 0.0;
        const double t = x - origin_;
        double s = coeffs_.back();
        double c = 0.0;
        for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
            const double p = s * t;
            const double pe = std::fma(s, t, -p);
            const double sn = p + coeffs_[i];
            const double bb = sn - p;
            const double se = (p - (sn - bb)) + (coeffs_[i] - bb);
            c = c * t + (pe + se);
            s = sn;
        }
        return s + c;
    }

    Poly derivative(int order = 1) const {
        if (order <= 0) return *this;
        if (static_cast<int>(coeffs_.size()) <= order) return Poly({}, origin_);
        std::vector<double> d(coeffs_.size() - static_cast<std::size_t>(order));
        for (std::size_t i = 0; i < d.size(); ++i) {
            double f = 1.0;
            for (int j = 1; j <= order; ++j) f *= static_cast<double>(i + static_cast<std::size_t>(j));
            d[i] = coeffs_[i + static_cast<std::size_t>(order)] * f;
        }
        return Poly(std::move(d), origin_);
    }

    double derivative_at(int order, double x) const { return derivative(order)(x); }

    /// Antiderivative vanishing at the origin.
    Poly antiderivative() const {
        std::vector<double> d(coeffs_.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) d[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
        return Poly(std::move(d), origin_);
    }

    /// Exact integral over [a, b] through the antiderivative.
    double integrate(double a, double b) const {
        const Poly P = antiderivative();
        return P(b) - P(a);
    }

    /// The same polynomial expanded about a new origin (Taylor shift).
    Poly recentered(double new_origin) const {
        if (new_origin == origin_ || coeffs_.empty()) {
            Poly p = *this;
            p.origin_ = new_origin;
            return p;
        }
        std::vector<double> c = coeffs_;
        const double s = new_origin - origin_;
        const std::size_t n = c.size();
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = n - 1; j-- > i;) c[j] += s * c[j + 1];
        return Poly(std::move(c), new_origin);
    }

    /// Monomial coefficients about 0.
    std::vector<double> monomial() const { return recentered(0.0).coeffs(); }

    Poly& operator+=(const Poly& q) {
        const Poly r = q.recentered(origin_);
        if (r.coeffs_.size() > coeffs_.size()) coeffs_.resize(r.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < r.coeffs_.size(); ++i) coeffs_[i] += r.coeffs_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& q) { return *this += (-1.0) * q; }
    Poly& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        trim();
        return *this;
    }

    friend Poly operator+(Poly p, const Poly& q) { return p += q; }
    friend Poly operator-(Poly p, const Poly& q) { return p -= q; }
    friend Poly operator*(double s, Poly p) { return p *= s; }
    friend Poly operator*(Poly p, double s) { return p *= s; }
    friend Poly operator*(const Poly& p, const Poly& q) {
        if (p.is_zero() || q.is_zero()) return Poly({}, p.origin_);
        const Poly r = q.recentered(p.origin_);
        std::vector<double> c(p.coeffs_.size() + r.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < r.coeffs_.size(); ++j) c[i + j] += p.coeffs_[i] * r.coeffs_[j];
        return Poly(std::move(c), p.origin_);
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
    double origin_ = 0.0;
};

/// Taylor polynomial sum_k jet[k]/k! (x - a)^k, kept centered at a.
inline Poly taylor_from_jet(std::span<const double> jet, double a) {
    if (jet.empty()) throw DomainError("taylor_from_jet needs at least one jet value");
    std::vector<double> c(jet.size());
    double fact = 1.0;
    for (std::size_t k = 0; k < jet.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        c[k] = jet[k] / fact;
    }
    return Poly(std::move(c), a);
}

namespace detail {

inline double bisect_root(const Poly& p, double lo, double hi, double plo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi)) break;
        const double pm = p(mid);
        if (pm == 0.0) return mid;
        if ((pm < 0.0) == (plo < 0.0)) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

inline void require_interval(double a, double b, const char* what) {
    if (!(a < b)) throw DomainError(std::string(what) + ": requires a < b");
}

}  // namespace detail

/// Real roots of p in [a, b], ascending. The critical points (roots of p',
/// found recursively) split [a, b] into monotone pieces and every sign change
/// is refined by bisection down to adjacent doubles. Even-multiplicity roots
/// are reported only when p vanishes exactly at a critical point.
inline std::vector<double> real_roots(const Poly& p, double a, double b) {
    std::vector<double> roots;
    if (p.is_zero() || p.degree() == 0) return roots;
    if (p.degree() == 1) {
        const double r = p.origin() - p.coeffs()[0] / p.coeffs()[1];
        if (r >= a && r <= b) roots.push_back(r);
        return roots;
    }
    std::vector<double> pts{a};
    for (double c : real_roots(p.derivative(), a, b))
        if (c > pts.back() && c < b) pts.push_back(c);
    pts.push_back(b);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double l = pts[i];
        const double r = pts[i + 1];
        const double pl = p(l);
        const double pr = p(r);
        if (pl == 0.0) {
            if (roots.empty() || roots.back() != l) roots.push_back(l);
            continue;
        }
        if ((pl < 0.0) != (pr < 0.0) && pr != 0.0) roots.push_back(detail::bisect_root(p, l, r, pl));
    }
    if (p(b) == 0.0 && (roots.empty() || roots.back() != b)) roots.push_back(b);
    return roots;
}

/// Integral of |p| over [a, b], summing the antiderivative over sign-constant pieces.
inline double integral_abs(const Poly& p, double a, double b) {
    detail::require_interval(a, b, "integral_abs");
    if (p.is_zero()) return 0.0;
    std::vector<double> pts{a};
    for (double r : real_roots(p, a, b))
        if (r > pts.back() && r < b) pts.push_back(r);
    pts.push_back(b);
    const Poly P = p.antiderivative();
    CompensatedSum s;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += std::abs(P(pts[i + 1]) - P(pts[i]));
    return s.value();
}

struct MaxAbs {
    double value = 0.0;
    double argmax = 0.0;
};

/// max |p| over [a, b] from the endpoints and the interior critical points.
/// The first point attaining the maximum (scanning left to right) is returned.
inline MaxAbs max_abs(const Poly& p, double a, double b) {
    detail::require_interval(a, b, "max_abs");
    std::vector<double> pts{a};
    if (p.degree() >= 2)
        for (double c : real_roots(p.derivative(), a, b))
            if (c > a && c < b) pts.push_back(c);
    pts.push_back(b);
    MaxAbs best{std::abs(p(a)), a};
    for (double x : pts) {
        const double v = std::abs(p(x));
        if (v > best.value) best = {v, x};
    }
    return best;
}

/// Leftmost closed subinterval of [a, b] of length at least (b - a)/(4 d^2),
/// d = deg p, on which |p| >= M/2 with M = max |p|. p has constant sign there.
inline Interval big_subinterval(const Poly& p, double a, double b) {
    detail::require_interval(a, b, "big_subinterval");
    if (p.is_zero()) throw DegenerateInput("big_subinterval: polynomial is identically zero");
    if (p.degree() == 0) return {a, b};
    const MaxAbs mx = max_abs(p, a, b);
    if (mx.value == 0.0) throw DegenerateInput("big_subinterval: polynomial vanishes on [a, b]");
    const double half = 0.5 * mx.value;
    const double d = static_cast<double>(p.degree());
    const double need = (b - a) / (4.0 * d * d);

    std::vector<double> pts{a, b};
    for (double r : real_roots(p - Poly::constant(half, p.origin()), a, b)) pts.push_back(r);
    for (double r : real_roots(p + Poly::constant(half, p.origin()), a, b)) pts.push_back(r);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Adjacent qualifying pieces are merged; a sign switch would need |p| < M/2 in between.
    std::vector<Interval> runs;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double l = pts[i];
        const double r = pts[i + 1];
        if (std::abs(p(0.5 * (l + r))) < half) continue;
        if (!runs.empty() && runs.back().hi == l)
            runs.back().hi = r;
        else
            runs.push_back({l, r});
    }
    for (const Interval& run : runs)
        if (run.length() >= need * (1.0 - 1e-12)) return run;
    throw InternalError("big_subinterval: no subinterval of the guaranteed length was found");
}

/// Exact integral of p q over [a, b].
inline double integrate_product(const Poly& p, const Poly& q, double a, double b) {
    detail::require_interval(a, b, "integrate_product");
    return (p * q).integrate(a, b);
}

}  // namespace hwx
