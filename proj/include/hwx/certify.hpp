#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hwx/detail/parallel.hpp"
#include "hwx/discrepancy.hpp"
#include "hwx/jets.hpp"
#include "hwx/modulus.hpp"

namespace hwx {

/// |F^k(b) - T_a^{m-k} F^k(b)| / (omega(|b - a|) |b - a|^{m-k}). The Taylor
/// base is a, whichever side of b it lies on.
inline double whitney_defect(const JetFamily& jet, int k, double a, double b, const Modulus& omega) {
    if (a == b) throw DomainError("whitney_defect needs a != b");
    if (k < 0 || k > jet.m()) throw DomainError("whitney_defect: order outside [0, m]");
    const double num = std::abs(jet.value(k, b) - jet.taylor_remainder_base(k, a, b));
    const double d = std::abs(b - a);
    const double den = omega(d) * std::pow(d, jet.m() - k);
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

/// H^k(x) - 2 sum_{i<k} C(k-1, i) (F^{k-i} G^i - G^{k-i} F^i)(x).
inline double check_horizontality(const JetTriple& jt, double x, int k) {
    if (k < 1 || k > jt.m) throw DomainError("check_horizontality: order must lie in [1, m]");
    const std::vector<double> F = jt.F.jet(x);
    const std::vector<double> G = jt.G.jet(x);
    CompensatedSum s;
    double binom = 1.0;
    for (int i = 0; i < k; ++i) {
        if (i > 0) binom = binom * (k - i) / i;
        s += binom * F[static_cast<std::size_t>(k - i)] * G[static_cast<std::size_t>(i)];
        s += -binom * G[static_cast<std::size_t>(k - i)] * F[static_cast<std::size_t>(i)];
    }
    return jt.H.value(k, x) - 2.0 * s.value();
}

namespace detail {

// Residual divided by 1 + |H^k| + the absolute size of the bilinear terms.
inline double horizontality_relative(const JetTriple& jt, double x, int k) {
    const std::vector<double> F = jt.F.jet(x);
    const std::vector<double> G = jt.G.jet(x);
    double scale = 1.0 + std::abs(jt.H.value(k, x));
    double binom = 1.0;
    for (int i = 0; i < k; ++i) {
        if (i > 0) binom = binom * (k - i) / i;
        scale += 2.0 * binom *
                 (std::abs(F[static_cast<std::size_t>(k - i)] * G[static_cast<std::size_t>(i)]) +
                  std::abs(G[static_cast<std::size_t>(k - i)] * F[static_cast<std::size_t>(i)]));
    }
    return std::abs(check_horizontality(jt, x, k)) / scale;
}

}  // namespace detail

using PairGrid = std::vector<std::pair<double, double>>;

/// All pairs of component endpoints, then pairs among the sample points of
/// K: every pair when that fits under `cap`, otherwise pairs (i, i + 2^s)
/// thinned by a fixed stride. Pairs are ordered a < b and deduplicated.
inline PairGrid default_pair_grid(const JetTriple& jt, int interior = 16, std::size_t cap = 20000) {
    PairGrid grid;
    const std::vector<double> ends = jt.K->endpoints();
    for (std::size_t i = 0; i < ends.size(); ++i)
        for (std::size_t j = i + 1; j < ends.size(); ++j) grid.emplace_back(ends[i], ends[j]);

    const std::vector<double> pts = jt.points(interior);
    const std::size_t n = pts.size();
    PairGrid extra;
    if (n * (n - 1) / 2 <= cap) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) extra.emplace_back(pts[i], pts[j]);
    } else {
        for (std::size_t step = 1; step < n; step *= 2)
            for (std::size_t i = 0; i + step < n; ++i) extra.emplace_back(pts[i], pts[i + step]);
    }
    const std::size_t room = cap > grid.size() ? cap - grid.size() : 0;
    if (extra.size() > room && room > 0) {
        PairGrid thinned;
        const double stride = static_cast<double>(extra.size()) / static_cast<double>(room);
        for (std::size_t i = 0; i < room; ++i)
            thinned.push_back(extra[static_cast<std::size_t>(static_cast<double>(i) * stride)]);
        extra = std::move(thinned);
    } else if (room == 0) {
        extra.clear();
    }
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

struct WorstPair {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    int k = -1;  // jet order where relevant
};

struct CertReport {
    struct Whitney {
        double constant = 0.0;         // sup over pairs and orders
        std::vector<double> per_order;  // sup over pairs for each k = 0..m
        WorstPair worst;
    };
    Whitney whitney_F, whitney_G, whitney_H;
    double horizontality_max_residual = 0.0;
    double horizontality_max_relative = 0.0;
    WorstPair worst_horizontality;  // a = b = x
    double ratio_sup_omega = 0.0;
    double ratio_sup_one_scaled = 0.0;
    WorstPair worst_ratio_omega;
    WorstPair worst_ratio_one_scaled;
    std::size_t pair_count = 0;
    std::size_t point_count = 0;

    double whitney_constant() const {
        return std::max({whitney_F.constant, whitney_G.constant, whitney_H.constant});
    }
};

namespace detail {

inline void merge_whitney(CertReport::Whitney& into, const CertReport::Whitney& w) {
    for (std::size_t k = 0; k < into.per_order.size(); ++k)
        into.per_order[k] = std::max(into.per_order[k], w.per_order[k]);
    if (w.constant > into.constant || (into.worst.k < 0 && w.worst.k >= 0)) {
        into.constant = w.constant;
        into.worst = w.worst;
    }
}

inline void update_whitney(CertReport::Whitney& w, const JetFamily& jet, double a, double b,
                           const Modulus& omega) {
    for (int k = 0; k <= jet.m(); ++k) {
        for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            const double d = whitney_defect(jet, k, x, y, omega);
            double& slot = w.per_order[static_cast<std::size_t>(k)];
            slot = std::max(slot, d);
            if (d > w.constant || (w.worst.k < 0 && d >= w.constant)) {
                w.constant = d;
                w.worst = {x, y, d, k};
            }
        }
    }
}

}  // namespace detail

/// Empirical Whitney constants, horizontality residuals and discrepancy
/// ratio sups over a finite pair grid. Deterministic for a given grid.
/// An empty grid (K a single point) leaves every pair quantity at zero.
inline CertReport certify(const JetTriple& jt, const Modulus& omega, const PairGrid& pairs,
                          int interior = 16) {
    for (const auto& [a, b] : pairs) {
        if (!(a < b)) throw DomainError("certify: every pair needs a < b");
        jt.F.component(a);
        jt.F.component(b);
    }
    const std::size_t orders = static_cast<std::size_t>(jt.m) + 1;
    CertReport blank;
    for (auto* w : {&blank.whitney_F, &blank.whitney_G, &blank.whitney_H}) w->per_order.assign(orders, 0.0);

    std::vector<CertReport> partial(std::max<std::size_t>(1, std::thread::hardware_concurrency()), blank);
    const std::size_t used = detail::parallel_chunks(
        pairs.size(),
        [&](std::size_t lo, std::size_t hi, std::size_t c) {
            CertReport& r = partial[c];
            for (std::size_t i = lo; i < hi; ++i) {
                const auto [a, b] = pairs[i];
                detail::update_whitney(r.whitney_F, jt.F, a, b, omega);
                detail::update_whitney(r.whitney_G, jt.G, a, b, omega);
                detail::update_whitney(r.whitney_H, jt.H, a, b, omega);
                const PairFunctionals p = pair_functionals(jt, omega, a, b);
                const double ro = std::abs(p.ratio_omega);
                if (ro > r.ratio_sup_omega || r.worst_ratio_omega.k < 0) {
                    r.ratio_sup_omega = std::max(r.ratio_sup_omega, ro);
                    r.worst_ratio_omega = {a, b, r.ratio_sup_omega, 0};
                }
                if (p.ratio_one_scaled > r.ratio_sup_one_scaled || r.worst_ratio_one_scaled.k < 0) {
                    r.ratio_sup_one_scaled = std::max(r.ratio_sup_one_scaled, p.ratio_one_scaled);
                    r.worst_ratio_one_scaled = {a, b, r.ratio_sup_one_scaled, 0};
                }
            }
        },
        64);

    CertReport out = blank;
    for (std::size_t c = 0; c < used; ++c) {
        const CertReport& r = partial[c];
        detail::merge_whitney(out.whitney_F, r.whitney_F);
        detail::merge_whitney(out.whitney_G, r.whitney_G);
        detail::merge_whitney(out.whitney_H, r.whitney_H);
        if (r.ratio_sup_omega > out.ratio_sup_omega || (c == 0)) {
            out.ratio_sup_omega = r.ratio_sup_omega;
            out.worst_ratio_omega = r.worst_ratio_omega;
        }
        if (r.ratio_sup_one_scaled > out.ratio_sup_one_scaled || (c == 0)) {
            out.ratio_sup_one_scaled = r.ratio_sup_one_scaled;
            out.worst_ratio_one_scaled = r.worst_ratio_one_scaled;
        }
    }

    const std::vector<double> pts = jt.points(interior);
    for (double x : pts) {
        for (int k = 1; k <= jt.m; ++k) {
            const double res = std::abs(check_horizontality(jt, x, k));
            const double rel = detail::horizontality_relative(jt, x, k);
            if (res > out.horizontality_max_residual) {
                out.horizontality_max_residual = res;
                out.worst_horizontality = {x, x, res, k};
            }
            out.horizontality_max_relative = std::max(out.horizontality_max_relative, rel);
        }
    }
    out.pair_count = pairs.size();
    out.point_count = pts.size();
    return out;
}

inline CertReport certify(const JetTriple& jt, const Modulus& omega) {
    return certify(jt, omega, default_pair_grid(jt));
}

}  // namespace hwx
