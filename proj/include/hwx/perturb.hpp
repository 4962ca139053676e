#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hwx/bump.hpp"
#include "hwx/discrepancy.hpp"
#include "hwx/error.hpp"
#include "hwx/jets.hpp"
#include "hwx/modulus.hpp"
#include "hwx/poly.hpp"
#include "hwx/quadrature.hpp"
#include "hwx/whitney.hpp"

namespace hwx {

/// gain * base * phi(2 (x - x0) / l(J)), with base = 48 e^{9/8} m^2 omega(b - a) (b - a)^m.
struct Mollifier {
    Interval J;
    double base = 0.0;
    double gain = 1.0;

    double center() const { return J.midpoint(); }
    double half_width() const { return 0.5 * J.length(); }

    double derivative(int i, double x) const {
        const double h = half_width();
        const double s = (x - center()) / h;
        if (!(std::abs(s) < 1.0)) return 0.0;
        const double d = bump_derivative(i, s);
        if (d == 0.0) return 0.0;
        return gain * base * d * std::pow(1.0 / h, i);
    }
    double operator()(double x) const { return derivative(0, x); }
};

inline double mollifier_base(const Modulus& omega, int m, double a, double b) {
    return 48.0 * std::exp(9.0 / 8.0) * m * m * omega(b - a) * std::pow(b - a, m);
}

/// The unscaled mollifier on J for the gap [a, b].
inline Mollifier build_mollifier(Interval J, double a, double b, const Modulus& omega, int m) {
    if (!(a < b)) throw DomainError("build_mollifier needs a < b");
    if (m < 1) throw DomainError("build_mollifier needs m >= 1");
    if (J.lo < a || J.hi > b || !(J.lo < J.hi)) throw DomainError("build_mollifier: J must be a subinterval of [a, b]");
    const double need = (b - a) / (18.0 * m * m);
    if (J.length() < need * (1.0 - 1e-12))
        throw DomainError("build_mollifier: J is shorter than (b - a)/(18 m^2)");
    return Mollifier{J, mollifier_base(omega, m, a, b), 1.0};
}

struct PerturbConstants {
    double C = 1.0;
    double C0_hat = 1.0;
    double C0 = 1.0;
    double B = 0.0;
    double C1 = 1.0;
    double C_tilde = 1.0;
};

/// C0 from the explicit bump-norm formula, then B, C1 and C_tilde for a given C >= 1.
inline PerturbConstants perturb_constants(double C, int m, double diam) {
    if (!(C >= 1.0) || !std::isfinite(C)) throw DomainError("perturbation constant C must be finite and >= 1");
    if (m < 1 || m > max_jet_order) throw DomainError("perturb_constants: order out of range");
    PerturbConstants k;
    k.C = C;
    const double mm = m;
    double c0_hat = 1.0;
    for (int i = 0; i <= m; ++i) {
        const double term = 48.0 * std::exp(9.0 / 8.0) * std::pow(36.0, i) * std::pow(mm, 2.0 * i + 2.0) *
                            (bump_sup_norm(i) + 1.0) * (std::pow(diam, m - i) + 1.0);
        c0_hat = std::max(c0_hat, term);
    }
    k.C0_hat = c0_hat;
    k.C0 = c0_hat * 36.0 * mm * mm * (bump_sup_norm(m + 1) + 1.0);
    k.B = std::sqrt(6.0 * C * (1.0 + 2.0 * C * k.C0));
    k.C1 = std::max(1.0, k.C0 * k.B / (48.0 * mm * mm));
    k.C_tilde = std::max(C * k.C0, 6.0 * k.C1);
    return k;
}

struct MollifierCheck {
    bool vanishes_outside = true;  // (a)
    bool middle_third = true;      // (b)
    bool slope = true;             // (c)
    bool height = true;            // (d)
    bool derivatives = true;       // (e)
    bool modulus = true;           // (f)
    double middle_third_margin = std::numeric_limits<double>::infinity();  // min eta / bound
    double slope_margin = std::numeric_limits<double>::infinity();         // min eta' / bound
    double worst_height = 0.0;       // max eta / bound
    double worst_derivative = 0.0;   // max |D^i eta| / bound
    double worst_modulus = 0.0;      // max |D^m eta(x) - D^m eta(y)| / bound
    bool pass() const { return vanishes_outside && middle_third && slope && height && derivatives && modulus; }
};

/// Sampled check of the six mollifier properties, for the unscaled shape of `eta`.
inline MollifierCheck check_mollifier(const Mollifier& eta, double a, double b, const Modulus& omega, int m,
                                      double C0, int samples = 2000) {
    Mollifier e = eta;
    e.gain = 1.0;
    MollifierCheck r;
    const double rel = 1e-12;
    const double w = omega(b - a);
    const double len = b - a;
    const double n = samples;

    std::vector<double> xs(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i <= samples; ++i) xs[static_cast<std::size_t>(i)] = a + len * i / n;
    for (double x : xs) {
        const double v = e(x);
        if (!e.J.contains(x) && v != 0.0) r.vanishes_outside = false;
        const double hb = C0 * w * std::pow(len, m);
        r.worst_height = std::max(r.worst_height, v / hb);
        for (int i = 0; i <= m; ++i)
            r.worst_derivative = std::max(r.worst_derivative, std::abs(e.derivative(i, x)) / (C0 * w));
    }
    // Points just outside J on both sides.
    for (double x : {std::nextafter(e.J.lo, -HUGE_VAL), std::nextafter(e.J.hi, HUGE_VAL)})
        if (x >= a && x <= b && e(x) != 0.0) r.vanishes_outside = false;

    const double l = e.J.length();
    const double mid_bound = 48.0 * m * m * w * std::pow(len, m);
    const double slope_bound = 81.0 * m * m * w * std::pow(len, m - 1);
    for (int i = 0; i <= samples; ++i) {
        const double xm = e.J.lo + l / 3.0 + (l / 3.0) * i / n;
        r.middle_third_margin = std::min(r.middle_third_margin, e(xm) / mid_bound);
        const double xs6 = e.J.lo + l / 6.0 + (l / 6.0) * i / n;
        r.slope_margin = std::min(r.slope_margin, e.derivative(1, xs6) / slope_bound);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t step = 1; i + step < xs.size(); step *= 2) {
            const double x = xs[i], y = xs[i + step];
            const double d = std::abs(e.derivative(m, x) - e.derivative(m, y));
            r.worst_modulus = std::max(r.worst_modulus, d / (C0 * omega(y - x)));
        }
    }
    r.middle_third = r.middle_third_margin >= 1.0 - rel;
    r.slope = r.slope_margin >= 1.0 - rel;
    r.height = r.worst_height <= 1.0 + rel;
    r.derivatives = r.worst_derivative <= 1.0 + rel;
    r.modulus = r.worst_modulus <= 1.0 + rel;
    return r;
}

/// A finite sum of mollifiers; identically zero when empty.
struct Perturbation {
    std::vector<Mollifier> terms;

    bool is_zero() const {
        return std::all_of(terms.begin(), terms.end(), [](const Mollifier& t) { return t.gain == 0.0; });
    }
    double derivative(int k, double x) const {
        double s = 0.0;
        for (const Mollifier& t : terms) s += t.derivative(k, x);
        return s;
    }
    double operator()(double x) const { return derivative(0, x); }
    /// Smallest interval containing every support; empty (lo > hi) when zero.
    Interval support() const {
        Interval s{HUGE_VAL, -HUGE_VAL};
        for (const Mollifier& t : terms) {
            if (t.gain == 0.0) continue;
            s.lo = std::min(s.lo, t.J.lo);
            s.hi = std::max(s.hi, t.J.hi);
        }
        return s;
    }
};

/// Everything one gap needs: centered extensions of F and G, the Taylor
/// derivative data and the height discrepancy to be absorbed.
struct GapProblem {
    std::size_t index = 0;
    double a = 0.0;
    double b = 1.0;
    int m = 1;
    WhitneyPiece f, g;      // extensions of the jets translated to vanish at a
    Poly TF_prime, TG_prime;
    double TfPrime_int = 0.0;
    double TgPrime_int = 0.0;
    double omega_val = 0.0;
    double len_m = 0.0;     // (b - a)^m
    double V = 0.0;         // velocity on the gap
    double H_increment = 0.0;  // translated H(b)
    double A_raw = 0.0;
    double A_script = 0.0;  // A_raw snapped to 0 below the noise floor
    double height_scale = 0.0;
};

namespace detail {

// Composite 20-point Gauss-Legendre over `panels` equal panels.
template <class F>
double gl_panels(F&& f, double a, double b, int panels = 64) {
    CompensatedSum s;
    for (int p = 0; p < panels; ++p) {
        const double l = a + (b - a) * p / panels;
        const double r = p + 1 == panels ? b : a + (b - a) * (p + 1) / panels;
        s += gauss_legendre(f, l, r);
    }
    return s.value();
}

inline constexpr double gap_rel_tol = 1e-13;
inline constexpr double discrepancy_snap = 1e-12;

}  // namespace detail

/// The swept-area integral 2 int (f'g - g'f) over [a, b] splits into an exact
/// polynomial part from the left Taylor polynomials and a blend remainder
/// that is integrated adaptively.
inline GapProblem make_gap_problem(const JetTriple& jt, const Modulus& omega, std::size_t gap_index) {
    const auto gaps = jt.K->gaps();
    if (gap_index >= gaps.size()) throw DomainError("gap index out of range");
    const double a = gaps[gap_index].lo;
    const double b = gaps[gap_index].hi;
    const JetTriple t = translate_left(jt, a);

    GapProblem gp;
    gp.index = gap_index;
    gp.a = a;
    gp.b = b;
    gp.m = jt.m;
    gp.f = whitney_extend_gap(t.F.jet(a), t.F.jet(b), a, b);
    gp.g = whitney_extend_gap(t.G.jet(a), t.G.jet(b), a, b);
    const Poly& P = gp.f.taylor_left();
    const Poly& Q = gp.g.taylor_left();
    gp.TF_prime = P.derivative();
    gp.TG_prime = Q.derivative();
    gp.TfPrime_int = integral_abs(gp.TF_prime, a, b);
    gp.TgPrime_int = integral_abs(gp.TG_prime, a, b);
    gp.omega_val = omega(b - a);
    gp.len_m = std::pow(b - a, jt.m);
    gp.V = detail::velocity(gp.omega_val, gp.len_m, gp.TfPrime_int + gp.TgPrime_int);
    gp.H_increment = t.H.value(0, b);

    const Poly D = gp.f.taylor_right().recentered(a) - P;
    const Poly E = gp.g.taylor_right().recentered(a) - Q;
    const Poly Pd = P.derivative(), Qd = Q.derivative(), Dd = D.derivative(), Ed = E.derivative();
    const double exact = (Pd * Q - Qd * P).integrate(a, b);
    const Poly lin = Pd * E + Dd * Q - Qd * D - Ed * P;
    const Poly quad = Dd * E - Ed * D;
    const Poly slope = D * Q - E * P;
    const WhitneyPiece& fp = gp.f;
    auto rest = [&](double x) {
        const double th = fp.blend(0, x);
        const double th1 = fp.blend(1, x);
        return th * lin(x) + th * th * quad(x) + th1 * slope(x);
    };
    const double swept = exact + integrate(rest, a, b, detail::gap_rel_tol);
    gp.A_raw = gp.H_increment - 2.0 * swept;

    const double spread = detail::gl_panels(
        [&](double x) {
            return std::abs(gp.f.derivative(1, x) * gp.g(x)) + std::abs(gp.g.derivative(1, x) * gp.f(x));
        },
        a, b);
    // The left translation cancels terms of the untranslated size; they set the rounding floor too.
    const double Fa = jt.F.value(0, a), Ga = jt.G.value(0, a), Fb = jt.F.value(0, b), Gb = jt.G.value(0, b);
    const double translation = std::abs(jt.H.value(0, a)) + std::abs(jt.H.value(0, b)) +
                               2.0 * (std::abs(Fa * Gb) + std::abs(Ga * Fb));
    gp.height_scale = std::abs(gp.H_increment) + translation + 2.0 * spread;
    gp.A_script = std::abs(gp.A_raw) <= detail::discrepancy_snap * gp.height_scale ? 0.0 : gp.A_raw;
    return gp;
}

enum class GapCase { f_big, g_big, both_small };

inline const char* to_string(GapCase c) {
    switch (c) {
        case GapCase::f_big: return "F_BIG";
        case GapCase::g_big: return "G_BIG";
        case GapCase::both_small: return "BOTH_SMALL";
    }
    return "?";
}

/// F_BIG when int|(T_a F)'| >= max(int|(T_a G)'|, C C0 omega (b-a)^m), then the
/// symmetric G_BIG test, else BOTH_SMALL. Ties go to F_BIG.
inline GapCase dispatch_case(const GapProblem& gp, double C, double C0) {
    const double threshold = C * C0 * gp.omega_val * gp.len_m;
    if (gp.TfPrime_int >= std::max(gp.TgPrime_int, threshold)) return GapCase::f_big;
    if (gp.TgPrime_int >= std::max(gp.TfPrime_int, threshold)) return GapCase::g_big;
    return GapCase::both_small;
}

struct GapSolution {
    GapCase kind = GapCase::both_small;
    int subcase = 0;  // 1..3 inside BOTH_SMALL, 0 otherwise
    double lambda = std::numeric_limits<double>::quiet_NaN();
    Perturbation phi, psi;
    PerturbConstants constants;
    double A_script = 0.0;
    double int_eta_fprime = 0.0;
    double int_xi_gprime = 0.0;
    double int_eta_xiprime = 0.0;
    double endpoint_flatness = 0.0;
    double goal_value = 0.0;
    double goal_residual = 0.0;    // relative to |A|
    double height_residual = 0.0;  // relative to the height scale
    double bound_values_ratio = 0.0;   // sup |D^k phi|, |D^k psi| over C_tilde omega(b - a)
    double bound_modulus_ratio = 0.0;  // sampled modulus of D^m over C_tilde omega(|x - y|)
};

namespace detail {

template <class Fn>
double integrate_on(Fn&& fn, Interval J) {
    if (!(J.hi > J.lo)) return 0.0;
    return integrate(fn, J.lo, J.hi, gap_rel_tol, 16);
}

inline double int_mollifier_times(const Mollifier& eta, const WhitneyPiece& p) {
    return integrate_on([&](double x) { return eta(x) * p.derivative(1, x); }, eta.J);
}

}  // namespace detail

/// Large Taylor speed of F: phi = 0 and psi a rescaled mollifier on the
/// big subinterval of (T_a F)', with matching sign.
inline GapSolution solve_fbig(const GapProblem& gp, const Modulus& omega, const PerturbConstants& k,
                              bool use_g = false) {
    GapSolution s;
    s.kind = use_g ? GapCase::g_big : GapCase::f_big;
    s.constants = k;
    s.A_script = gp.A_script;
    if (gp.A_script == 0.0) return s;
    const Poly& Tp = use_g ? gp.TG_prime : gp.TF_prime;
    if (Tp.is_zero() || max_abs(Tp, gp.a, gp.b).value == 0.0)
        throw InconsistencyError("large-speed case with a vanishing Taylor derivative but nonzero discrepancy");
    const Interval J = big_subinterval(Tp, gp.a, gp.b);
    Mollifier eta = build_mollifier(J, gp.a, gp.b, omega, gp.m);
    eta.gain = Tp(J.midpoint()) > 0.0 ? 1.0 : -1.0;
    const double I = detail::int_mollifier_times(eta, use_g ? gp.g : gp.f);
    if (!(std::abs(I) > 1e-300))
        throw NumericalFailure("mollifier integral against the extension derivative vanished");
    if (use_g) {
        s.int_xi_gprime = I;
        eta.gain *= -gp.A_script / (4.0 * I);
        s.phi.terms.push_back(eta);
    } else {
        s.int_eta_fprime = I;
        eta.gain *= gp.A_script / (4.0 * I);
        s.psi.terms.push_back(eta);
    }
    return s;
}

inline GapSolution solve_gbig(const GapProblem& gp, const Modulus& omega, const PerturbConstants& k) {
    return solve_fbig(gp, omega, k, true);
}

/// Both Taylor speeds small: a slope mollifier xi on [a, b] and a bump eta
/// where xi' is large, combined in one of three sub-cases.
inline GapSolution solve_both_small(const GapProblem& gp, const Modulus& omega, const PerturbConstants& k) {
    GapSolution s;
    s.kind = GapCase::both_small;
    s.constants = k;
    s.A_script = gp.A_script;
    s.subcase = 1;
    if (gp.A_script == 0.0) return s;

    const double a = gp.a, b = gp.b;
    const double mm = static_cast<double>(gp.m) * gp.m;
    Mollifier xi = build_mollifier({a, b}, a, b, omega, gp.m);
    xi.gain = k.B / (81.0 * mm);
    Mollifier eta = build_mollifier({a + (b - a) / 6.0, a + (b - a) / 3.0}, a, b, omega, gp.m);
    eta.gain = k.B / (48.0 * mm);

    const double A = gp.A_script;
    const double absA = std::abs(A);
    s.int_eta_fprime = detail::int_mollifier_times(eta, gp.f);
    if (std::abs(s.int_eta_fprime) >= absA / 24.0) {
        eta.gain *= A / (4.0 * s.int_eta_fprime);
        s.psi.terms.push_back(eta);
        return s;
    }
    s.int_xi_gprime = detail::int_mollifier_times(xi, gp.g);
    if (std::abs(s.int_xi_gprime) >= absA / 24.0) {
        s.subcase = 2;
        xi.gain *= -A / (4.0 * s.int_xi_gprime);
        s.phi.terms.push_back(xi);
        return s;
    }

    s.subcase = 3;
    s.int_eta_xiprime = detail::integrate_on([&](double x) { return eta(x) * xi.derivative(1, x); }, eta.J);
    const double sigma = A > 0.0 ? 1.0 : -1.0;
    // F(lambda) = sigma * 4 int (sigma lambda eta f' - xi g' + sigma lambda eta xi'), affine in lambda.
    const double c0 = -4.0 * sigma * s.int_xi_gprime;
    const double c1 = 4.0 * (s.int_eta_fprime + s.int_eta_xiprime);
    if (!(c0 < absA / 6.0))
        throw InconsistencyError("scaling bracket failed: F(0) < |A|/6 does not hold");
    if (!(c0 + c1 > absA))
        throw InconsistencyError("scaling bracket failed: F(1) > |A| does not hold");

    const Interval span{a, b};
    auto F_direct = [&](double lambda) {
        return sigma * 4.0 *
               detail::integrate_on(
                   [&](double x) {
                       const double e = sigma * lambda * eta(x);
                       return e * gp.f.derivative(1, x) - xi(x) * gp.g.derivative(1, x) + e * xi.derivative(1, x);
                   },
                   span);
    };
    const double tol = 1e-12 * absA;
    double lambda = (absA - c0) / c1;
    if (!(lambda > 0.0 && lambda < 1.0) || std::abs(F_direct(lambda) - absA) > tol) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            lambda = 0.5 * (lo + hi);
            const double v = F_direct(lambda) - absA;
            if (std::abs(v) <= tol) break;
            (v < 0.0 ? lo : hi) = lambda;
        }
    }
    s.lambda = lambda;
    s.phi.terms.push_back(xi);
    eta.gain *= sigma * lambda;
    s.psi.terms.push_back(eta);
    return s;
}

namespace detail {

inline void finish_diagnostics(GapSolution& s, const GapProblem& gp, const Modulus& omega) {
    const double a = gp.a, b = gp.b;
    for (int k = 0; k <= gp.m; ++k)
        for (double x : {a, b})
            s.endpoint_flatness = std::max({s.endpoint_flatness, std::abs(s.phi.derivative(k, x)),
                                            std::abs(s.psi.derivative(k, x))});

    Interval sup = s.phi.support();
    const Interval sp = s.psi.support();
    sup = {std::min(sup.lo, sp.lo), std::max(sup.hi, sp.hi)};
    const auto goal = [&](double x) {
        return s.psi(x) * gp.f.derivative(1, x) - s.phi(x) * gp.g.derivative(1, x) +
               s.psi(x) * s.phi.derivative(1, x);
    };
    s.goal_value = sup.hi > sup.lo ? 4.0 * integrate(goal, sup.lo, sup.hi, gap_rel_tol, 32) : 0.0;
    const double diff = std::abs(s.goal_value - gp.A_script);
    s.goal_residual = gp.A_script != 0.0 ? diff / std::abs(gp.A_script) : diff;

    // 2 int (f'psi + phi'g + phi'psi - g'phi - psi'f - psi'phi) on top of the unperturbed sweep.
    const auto cross = [&](double x) {
        const double f = gp.f(x), g = gp.g(x), f1 = gp.f.derivative(1, x), g1 = gp.g.derivative(1, x);
        const double p = s.phi(x), q = s.psi(x), p1 = s.phi.derivative(1, x), q1 = s.psi.derivative(1, x);
        return f1 * q + p1 * g + p1 * q - g1 * p - q1 * f - q1 * p;
    };
    const double extra = sup.hi > sup.lo ? 2.0 * integrate(cross, sup.lo, sup.hi, gap_rel_tol, 32) : 0.0;
    const double swept = gp.H_increment - gp.A_raw + extra;
    s.height_residual = std::abs(gp.H_increment - swept) / std::max(gp.height_scale, 1e-300);
    if (gp.height_scale == 0.0) s.height_residual = std::abs(gp.H_increment - swept);

    const double Ct = s.constants.C_tilde;
    constexpr int n = 512;
    std::vector<double> top_phi(n + 1), top_psi(n + 1), xs(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double x = a + (b - a) * i / n;
        xs[static_cast<std::size_t>(i)] = x;
        for (int k = 0; k <= gp.m; ++k)
            s.bound_values_ratio = std::max(
                {s.bound_values_ratio, std::abs(s.phi.derivative(k, x)) / (Ct * gp.omega_val),
                 std::abs(s.psi.derivative(k, x)) / (Ct * gp.omega_val)});
        top_phi[static_cast<std::size_t>(i)] = s.phi.derivative(gp.m, x);
        top_psi[static_cast<std::size_t>(i)] = s.psi.derivative(gp.m, x);
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t step = 1; i + step < xs.size(); step *= 2) {
            const double w = Ct * omega(xs[i + step] - xs[i]);
            s.bound_modulus_ratio = std::max({s.bound_modulus_ratio, std::abs(top_phi[i + step] - top_phi[i]) / w,
                                              std::abs(top_psi[i + step] - top_psi[i]) / w});
        }
}

}  // namespace detail

struct PerturbTolerances {
    double flatness = 1e-11;
    double goal = 1e-9;
    double height = 1e-9;
};

/// Dispatch, solve and check one gap. Failed flatness, goal or height
/// checks raise AssemblyError; the value and modulus bounds are reported.
inline GapSolution perturb_gap(const GapProblem& gp, const Modulus& omega, const PerturbConstants& k,
                               const PerturbTolerances& tol = {}) {
    GapSolution s;
    switch (dispatch_case(gp, k.C, k.C0)) {
        case GapCase::f_big: s = solve_fbig(gp, omega, k); break;
        case GapCase::g_big: s = solve_gbig(gp, omega, k); break;
        case GapCase::both_small: s = solve_both_small(gp, omega, k); break;
    }
    detail::finish_diagnostics(s, gp, omega);
    const std::string where = " on gap " + std::to_string(gp.index) + " (" + std::to_string(gp.a) + ", " +
                              std::to_string(gp.b) + ")";
    if (s.endpoint_flatness > tol.flatness)
        throw AssemblyError("perturbation is not flat at the gap endpoints" + where);
    if (s.goal_residual > tol.goal)
        throw AssemblyError("perturbation misses the discrepancy: relative residual " +
                            std::to_string(s.goal_residual) + where);
    if (s.height_residual > tol.height)
        throw AssemblyError("perturbed lift misses the height increment: relative residual " +
                            std::to_string(s.height_residual) + where);
    return s;
}

}  // namespace hwx
