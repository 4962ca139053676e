#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hwx/certify.hpp"
#include "hwx/discrepancy.hpp"
#include "hwx/error.hpp"
#include "hwx/jets.hpp"
#include "hwx/modulus.hpp"

namespace hwx {

/// K = union of [1 - 2^{-n}, 1 - (3/4) 2^{-n}] for n = 0..n_max, plus {1};
/// F = G = 0, H^k = 0 for k >= 1 and H^0 = 4^{-mn} omega(2^{-(n+2)}) on the
/// n-th component, 0 at the point 1.
struct CounterexampleData {
    int m = 1;
    Modulus omega = Modulus::linear();
    int n_max = 2;
    std::vector<double> c, d;   // component endpoints
    std::vector<double> H0;     // per component, the point {1} last
    JetTriple jets;
};

inline int counterexample_max_n(int m) {
    // Keep omega(gap)^2 gap^{2m} well inside the normal double range.
    return std::min(50, 1000 / (2 * m + 2) - 2);
}

inline CounterexampleData build_counterexample(int m, const Modulus& omega, int n_max) {
    if (m < 1 || m > max_jet_order) throw DomainError("counterexample: m out of range");
    if (n_max < 2) throw DomainError("counterexample: n_max must be at least 2");
    if (n_max > counterexample_max_n(m))
        throw DomainError("counterexample: n_max above " + std::to_string(counterexample_max_n(m)) +
                          " loses exact dyadic endpoints or underflows the velocity");
    CounterexampleData data;
    data.m = m;
    data.omega = omega;
    data.n_max = n_max;
    std::vector<Interval> comps;
    std::vector<JetSourcePtr> F, H;
    auto zero = std::make_shared<PolyJet>(std::vector<Poly>{});
    for (int n = 0; n <= n_max; ++n) {
        const double p = std::ldexp(1.0, -n);
        data.c.push_back(1.0 - p);
        data.d.push_back(1.0 - 0.75 * p);
        comps.push_back({data.c.back(), data.d.back()});
        const double h = std::ldexp(1.0, -2 * m * n) * omega(std::ldexp(1.0, -(n + 2)));
        data.H0.push_back(h);
        H.push_back(std::make_shared<PolyJet>(std::vector<Poly>{Poly::constant(h)}));
    }
    comps.push_back({1.0, 1.0});
    data.H0.push_back(0.0);
    H.push_back(zero);
    auto K = make_set(std::move(comps));
    F.assign(K->size(), zero);
    data.jets = JetTriple(JetFamily(K, m, F), JetFamily(K, m, F), JetFamily(K, m, std::move(H)));
    return data;
}

struct DivergenceRow {
    int n = 0;
    double gap = 0.0;
    double A = 0.0;
    double V_omega_alpha = 0.0;
    double r = 0.0;
    double lower_bound = 0.0;
    bool meets_bound = true;
};

struct CounterexampleReport {
    double alpha = 1.0;
    double whitney_constant = 0.0;
    double whitney_bound = 0.0;  // 4^m
    WorstPair whitney_worst;
    double ratio_sup = 0.0;      // sup |A| / (V_one omega(b - a))
    double ratio_bound = 0.0;    // 16^m
    WorstPair ratio_worst;
    double horizontality_max_residual = 0.0;
    std::size_t pair_count = 0;
    std::vector<DivergenceRow> rows;
    bool whitney_pass = true;
    bool ratio_pass = true;
    bool lower_bounds_pass = true;
    bool monotone_pass = true;   // asserted only for alpha > 1/2
    bool asserted_divergence = true;
    int burn_in = 2;
    bool pass() const { return whitney_pass && ratio_pass && lower_bounds_pass && monotone_pass; }
};

/// Whitney constant and V_one-scaled ratio over all cross-component endpoint
/// pairs, and the sequence r_n = |A(d_n, c_{n+1})| / V_{omega^alpha}(d_n, c_{n+1}).
/// For alpha = 1/2 the rows are reported and checked against 16^m, but no
/// growth is asserted.
inline CounterexampleReport verify_bounds(const CounterexampleData& data, double alpha) {
    if (!(alpha >= 0.5 && alpha <= 1.0)) throw DomainError("verify_bounds: alpha must lie in [1/2, 1]");
    const JetTriple& jt = data.jets;
    const int m = data.m;
    CounterexampleReport r;
    r.alpha = alpha;
    r.whitney_bound = std::pow(4.0, m);
    r.ratio_bound = std::pow(16.0, m);
    r.asserted_divergence = alpha > 0.5;

    const std::vector<double> ends = jt.K->endpoints();
    for (std::size_t i = 0; i < ends.size(); ++i) {
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
            const double a = ends[i], b = ends[j];
            if (jt.K->component_of(a) == jt.K->component_of(b)) continue;
            ++r.pair_count;
            for (int k = 0; k <= m; ++k)
                for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
                    const double w = whitney_defect(jt.H, k, x, y, data.omega);
                    if (w > r.whitney_constant) {
                        r.whitney_constant = w;
                        r.whitney_worst = {x, y, w, k};
                    }
                }
            const PairFunctionals p = pair_functionals(jt, data.omega, a, b);
            if (p.ratio_one_scaled > r.ratio_sup) {
                r.ratio_sup = p.ratio_one_scaled;
                r.ratio_worst = {a, b, p.ratio_one_scaled, 0};
            }
        }
    }
    r.whitney_pass = r.whitney_constant <= r.whitney_bound;
    r.ratio_pass = r.ratio_sup <= r.ratio_bound * (1.0 + 1e-9);

    for (double x : jt.points())
        for (int k = 1; k <= m; ++k)
            r.horizontality_max_residual = std::max(r.horizontality_max_residual, std::abs(check_horizontality(jt, x, k)));

    const Modulus w_alpha = power(data.omega, alpha);
    const double lead = std::pow(16.0, m) * (1.0 - std::pow(4.0, -m));
    for (int n = 0; n < data.n_max; ++n) {
        DivergenceRow row;
        row.n = n;
        const double a = data.d[static_cast<std::size_t>(n)];
        const double b = data.c[static_cast<std::size_t>(n) + 1];
        row.gap = b - a;
        row.A = area_discrepancy(jt, a, b);
        row.V_omega_alpha = velocity_omega(jt, w_alpha, a, b);
        row.r = std::abs(row.A) / row.V_omega_alpha;
        row.lower_bound = lead * std::pow(data.omega(std::ldexp(1.0, -(n + 2))), 1.0 - 2.0 * alpha);
        row.meets_bound = r.asserted_divergence ? row.r >= row.lower_bound * (1.0 - 1e-12)
                                                : row.r <= r.ratio_bound * (1.0 + 1e-9);
        r.lower_bounds_pass = r.lower_bounds_pass && row.meets_bound;
        r.rows.push_back(row);
    }
    if (r.asserted_divergence)
        for (std::size_t i = static_cast<std::size_t>(r.burn_in) + 1; i < r.rows.size(); ++i)
            if (!(r.rows[i].r > r.rows[i - 1].r)) r.monotone_pass = false;
    return r;
}

}  // namespace hwx
