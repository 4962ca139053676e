#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "hwx/jets.hpp"
#include "hwx/modulus.hpp"
#include "hwx/poly.hpp"

namespace hwx {

struct PairFunctionals {
    double a = 0.0;
    double b = 0.0;
    double A = 0.0;
    double V_omega = 0.0;
    double V_one = 0.0;
    double ratio_omega = 0.0;       // A / V_omega
    double ratio_one_scaled = 0.0;  // |A| / (V_one omega(b - a))
};

namespace detail {

inline void require_pair(const JetTriple& jt, double a, double b) {
    if (!(a < b)) throw DomainError("pair functionals need a < b");
    jt.F.component(a);
    jt.F.component(b);
}

inline double safe_ratio(double num, double den) {
    if (den > 0.0) return num / den;
    if (num == 0.0) return 0.0;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

// int_a^b |(T_a F)'| + |(T_a G)'|
inline double taylor_speed(const Poly& TF, const Poly& TG, double a, double b) {
    return integral_abs(TF.derivative(), a, b) + integral_abs(TG.derivative(), a, b);
}

inline double velocity(double w, double len_m, double speed) {
    return w * w * len_m * len_m + w * len_m * speed;
}

}  // namespace detail

/// Height change not explained by the signed area swept by the Taylor
/// approximants at a, with the endpoint corrections. Polynomial integrals are exact.
inline double area_discrepancy(const JetTriple& jt, double a, double b) {
    detail::require_pair(jt, a, b);
    const Poly TF = jt.F.taylor(a);
    const Poly TG = jt.G.taylor(a);
    const double swept = (TF.derivative() * TG - TG.derivative() * TF).integrate(a, b);
    const double Fa = jt.F.value(0, a), Ga = jt.G.value(0, a);
    CompensatedSum s;
    s += jt.H.value(0, b);
    s += -jt.H.value(0, a);
    s += -2.0 * swept;
    s += 2.0 * Fa * (jt.G.value(0, b) - TG(b));
    s += -2.0 * Ga * (jt.F.value(0, b) - TF(b));
    return s.value();
}

inline double velocity_omega(const JetTriple& jt, const Modulus& omega, double a, double b) {
    detail::require_pair(jt, a, b);
    const double len_m = std::pow(b - a, jt.m);
    return detail::velocity(omega(b - a), len_m, detail::taylor_speed(jt.F.taylor(a), jt.G.taylor(a), a, b));
}

inline double velocity_one(const JetTriple& jt, double a, double b) {
    detail::require_pair(jt, a, b);
    const double len_m = std::pow(b - a, jt.m);
    return detail::velocity(1.0, len_m, detail::taylor_speed(jt.F.taylor(a), jt.G.taylor(a), a, b));
}

inline PairFunctionals pair_functionals(const JetTriple& jt, const Modulus& omega, double a, double b) {
    PairFunctionals p;
    p.a = a;
    p.b = b;
    p.A = area_discrepancy(jt, a, b);
    const double speed = detail::taylor_speed(jt.F.taylor(a), jt.G.taylor(a), a, b);
    const double len_m = std::pow(b - a, jt.m);
    const double w = omega(b - a);
    p.V_omega = detail::velocity(w, len_m, speed);
    p.V_one = detail::velocity(1.0, len_m, speed);
    p.ratio_omega = detail::safe_ratio(p.A, p.V_omega);
    p.ratio_one_scaled = detail::safe_ratio(std::abs(p.A), p.V_one * w);
    return p;
}

/// Left-translate the triple by the inverse of (F(a), G(a), H(a)) in the
/// Heisenberg group, so the translated jets vanish at a at order 0. Orders
/// k >= 1 of H follow the derivative of the group law.
inline JetTriple translate_left(const JetTriple& jt, double a) {
    const double Fa = jt.F.value(0, a);
    const double Ga = jt.G.value(0, a);
    const double Ha = jt.H.value(0, a);
    const std::size_t n = jt.K->size();
    std::vector<JetSourcePtr> f(n), g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
        const JetSourcePtr& F = jt.F.sources()[i];
        const JetSourcePtr& G = jt.G.sources()[i];
        const JetSourcePtr& H = jt.H.sources()[i];
        f[i] = std::make_shared<AffineJet>(-Fa, std::vector<std::pair<double, JetSourcePtr>>{{1.0, F}});
        g[i] = std::make_shared<AffineJet>(-Ga, std::vector<std::pair<double, JetSourcePtr>>{{1.0, G}});
        h[i] = std::make_shared<AffineJet>(
            -Ha, std::vector<std::pair<double, JetSourcePtr>>{{1.0, H}, {-2.0 * Ga, F}, {2.0 * Fa, G}});
    }
    JetTriple out(JetFamily(jt.K, jt.m, std::move(f)), JetFamily(jt.K, jt.m, std::move(g)),
                  JetFamily(jt.K, jt.m, std::move(h)));
    return out;
}

}  // namespace hwx
