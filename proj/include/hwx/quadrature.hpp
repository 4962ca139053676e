#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace hwx {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

namespace detail {

template <std::size_t N>
struct GaussLegendreRule {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendreRule() {
        // Newton iteration on P_N from the Chebyshev initial guess.
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double kk = static_cast<double>(k);
                    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

inline const GaussLegendreRule<20>& gauss_legendre_20() {
    static const GaussLegendreRule<20> rule;
    return rule;
}

inline const GaussLegendreRule<8>& gauss_legendre_8() {
    static const GaussLegendreRule<8> rule;
    return rule;
}

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double noise = 64.0 * 2.220446049250313e-16 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || std::abs(delta) <= noise ||
        !(lm > a && rm < b))
        return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// 8-point Gauss-Legendre rule on [a, b], for short panels of smooth integrands.
template <class F>
double gauss_legendre_short(F&& f, double a, double b) {
    const auto& rule = detail::gauss_legendre_8();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * s;
}

/// 20-point Gauss-Legendre rule on [a, b]. Exact for polynomials of degree <= 39.
template <class F>
double gauss_legendre(F&& f, double a, double b) {
    const auto& rule = detail::gauss_legendre_20();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * s.value();
}

/// Adaptive Simpson with Richardson correction. `abs_tol` is split across
/// `panels` equal initial panels so narrow features are not skipped.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, int panels = 8,
                        int max_depth = 40) {
    if (!(b > a)) return 0.0;
    CompensatedSum total;
    const double h = (b - a) / panels;
    const double tol = abs_tol / panels;
    double fa = f(a);
    for (int p = 0; p < panels; ++p) {
        const double l = a + h * p;
        const double r = (p + 1 == panels) ? b : a + h * (p + 1);
        const double m = 0.5 * (l + r);
        const double fm = f(m);
        const double fr = f(r);
        const double whole = (r - l) / 6.0 * (fa + 4.0 * fm + fr);
        total += detail::simpson_step(f, l, fa, r, fr, m, fm, whole, tol, max_depth);
        fa = fr;
    }
    return total.value();
}

/// Adaptive Simpson with the absolute tolerance set to `rel_tol` times a coarse
/// estimate of the integral of |f|.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, int panels = 8) {
    if (!(b > a)) return 0.0;
    constexpr int coarse = 64;
    const double h = (b - a) / coarse;
    CompensatedSum scale;
    for (int i = 0; i < coarse; ++i) {
        const double l = a + h * i;
        scale += h / 6.0 *
                 (std::abs(f(l)) + 4.0 * std::abs(f(l + 0.5 * h)) + std::abs(f(l + h)));
    }
    const double tol = rel_tol * scale.value();
    if (tol == 0.0) return 0.0;
    return adaptive_simpson(f, a, b, tol, panels);
}

}  // namespace hwx
