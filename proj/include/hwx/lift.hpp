#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hwx/certify.hpp"
#include "hwx/detail/parallel.hpp"
#include "hwx/error.hpp"
#include "hwx/jets.hpp"
#include "hwx/modulus.hpp"
#include "hwx/perturb.hpp"
#include "hwx/quadrature.hpp"
#include "hwx/whitney.hpp"

namespace hwx {

enum class Coord { F, G, H };

inline const char* to_string(Coord c) {
    switch (c) {
        case Coord::F: return "F";
        case Coord::G: return "G";
        case Coord::H: return "H";
    }
    return "?";
}

/// The curve on one gap: planar parts f + phi, g + psi (extensions of the
/// jets, centered at a and shifted back) and their horizontal lift starting
/// at H(a). Derivatives of the lift come from the Leibniz expansion; its
/// value uses a cumulative integral cached at cosine-spaced nodes plus a
/// Gauss-Legendre panel from the nearest node.
class GapCurve {
public:
    static constexpr int cache_nodes = 1024;

    GapCurve(const GapProblem& gp, GapSolution sol, double F_a, double G_a, double H_a)
        : a_(gp.a), b_(gp.b), f_(gp.f), g_(gp.g), sol_(std::move(sol)), F_a_(F_a), G_a_(G_a), H_a_(H_a) {
        nodes_.resize(cache_nodes + 1);
        cumulative_.resize(cache_nodes + 1);
        for (int j = 0; j <= cache_nodes; ++j)
            nodes_[static_cast<std::size_t>(j)] =
                a_ + (b_ - a_) * 0.5 * (1.0 - std::cos(std::numbers::pi * j / cache_nodes));
        nodes_.front() = a_;
        nodes_.back() = b_;
        CompensatedSum s;
        cumulative_[0] = 0.0;
        auto integrand = [this](double x) { return lift_integrand(x); };
        auto magnitude = [this](double x) { return lift_term_size(x); };
        for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
            const double l = nodes_[j], r = nodes_[j + 1], mid = 0.5 * (l + r);
            const double whole = gauss_legendre(integrand, l, r);
            const double halves = gauss_legendre(integrand, l, mid) + gauss_legendre(integrand, mid, r);
            const double err = std::abs(whole - halves);
            if (err <= 1e-14 * std::abs(halves)) {
                s += halves;
            } else {
                // Cancellation in F'G - FG' puts a floor on the attainable accuracy.
                const double floor = std::max(1e-15 * gauss_legendre(magnitude, l, r), 1e-17 * (r - l));
                s += err <= floor ? halves
                                  : adaptive_simpson(integrand, l, r, std::max(1e-13 * std::abs(halves), floor), 2, 24);
            }
            cumulative_[j + 1] = s.value();
        }
    }

    double a() const { return a_; }
    double b() const { return b_; }
    const GapSolution& solution() const { return sol_; }
    const WhitneyPiece& f_extension() const { return f_; }
    const WhitneyPiece& g_extension() const { return g_; }

    /// 2 (F'G - F G') at x.
    double lift_integrand(double x) const {
        const auto w = f_.weights(1, x);
        const double F = planar(Coord::F, 0, w), G = planar(Coord::G, 0, w);
        return 2.0 * (planar(Coord::F, 1, w) * G - F * planar(Coord::G, 1, w));
    }

    double derivative(Coord c, int k, double x) const {
        if (k < 0) throw DomainError("gap curve: negative derivative order");
        if (c != Coord::H) return planar(c, k, f_.weights(std::min(k, max_jet_order + 1), x));
        if (k == 0) return lift_value(x);
        if (k > max_jet_order + 1) throw DomainError("gap curve: derivative order too large");
        const auto w = f_.weights(k, x);
        // D^k H = 2 sum_{j<k} C(k-1, j) (D^{k-j}F D^j G - D^{k-j}G D^j F)
        CompensatedSum s;
        double binom = 1.0;
        for (int j = 0; j < k; ++j) {
            if (j > 0) binom = binom * (k - j) / j;
            s += binom * planar(Coord::F, k - j, w) * planar(Coord::G, j, w);
            s += -binom * planar(Coord::G, k - j, w) * planar(Coord::F, j, w);
        }
        return 2.0 * s.value();
    }

    double lift_value(double x) const {
        if (x <= a_) return H_a_;
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        if (j + 1 >= nodes_.size()) return H_a_ + cumulative_.back();
        const double base = H_a_ + cumulative_[j];
        if (x == nodes_[j]) return base;
        return base + gauss_legendre([this](double t) { return lift_integrand(t); }, nodes_[j], x);
    }

private:
    // F or G with blend weights shared between the two extensions.
    double planar(Coord c, int k, const WhitneyPiece::Weights& w) const {
        if (c == Coord::F) return (k == 0 ? F_a_ : 0.0) + f_.derivative(k, w) + sol_.phi.derivative(k, w.x);
        return (k == 0 ? G_a_ : 0.0) + g_.derivative(k, w) + sol_.psi.derivative(k, w.x);
    }

    double lift_term_size(double x) const {
        const auto w = f_.weights(1, x);
        const double F = planar(Coord::F, 0, w), G = planar(Coord::G, 0, w);
        return 2.0 * (std::abs(planar(Coord::F, 1, w) * G) + std::abs(F * planar(Coord::G, 1, w)));
    }

    double a_, b_;
    WhitneyPiece f_, g_;
    GapSolution sol_;
    double F_a_, G_a_, H_a_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;
};

/// Horizontal lift of a single gap curve with starting height H_a (no perturbation).
inline GapCurve lift_gap(const WhitneyPiece& f, const WhitneyPiece& g, double H_a) {
    if (f.a() != g.a() || f.b() != g.b()) throw DomainError("lift_gap: both pieces must span the same gap");
    GapProblem gp;
    gp.a = f.a();
    gp.b = f.b();
    gp.f = f;
    gp.g = g;
    return GapCurve(gp, GapSolution{}, 0.0, 0.0, H_a);
}

/// Gamma on the hull of K: jet values on K, gap curves in between. At gap
/// endpoints the jets are returned; the gap curves give the one-sided limits.
class PiecewiseCurve {
public:
    PiecewiseCurve() = default;
    PiecewiseCurve(JetTriple jets, std::vector<GapCurve> gaps) : jets_(std::move(jets)), gaps_(std::move(gaps)) {}

    const JetTriple& jets() const { return jets_; }
    const std::vector<GapCurve>& gaps() const { return gaps_; }
    int m() const { return jets_.m; }
    Interval hull() const { return jets_.K->hull(); }

    double derivative(Coord c, int k, double x) const {
        if (jets_.K->contains(x)) {
            const JetFamily& fam = c == Coord::F ? jets_.F : c == Coord::G ? jets_.G : jets_.H;
            return fam.value(k, x);
        }
        const auto g = jets_.K->gap_of(x);
        if (!g) throw DomainError("point " + std::to_string(x) + " lies outside the hull of K");
        return gaps_[*g].derivative(c, k, x);
    }
    double value(Coord c, double x) const { return derivative(c, 0, x); }

private:
    JetTriple jets_;
    std::vector<GapCurve> gaps_;
};

struct SeminormEstimate {
    double F = 0.0;
    double G = 0.0;
    double H = 0.0;
    double max() const { return std::max({F, G, H}); }
};

/// Sampled sup of |D^m c(x) - D^m c(y)| / omega(|x - y|) per coordinate, over
/// near pairs (separations from 1e-6 up to the largest gap) and far pairs.
inline SeminormEstimate seminorm_estimate(const PiecewiseCurve& curve, const Modulus& omega, int samples) {
    if (samples < 2) throw DomainError("seminorm_estimate needs at least two samples");
    const Interval hull = curve.hull();
    SeminormEstimate out;
    if (!(hull.length() > 0.0)) return out;
    const int m = curve.m();

    std::vector<double> xs;
    for (int i = 0; i < samples; ++i) xs.push_back(std::min(hull.hi, hull.lo + hull.length() * i / (samples - 1)));
    for (double e : curve.jets().K->endpoints()) xs.push_back(e);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double scale = hull.length();
    const auto gaps = curve.jets().K->gaps();
    if (!gaps.empty()) {
        scale = 0.0;
        for (const Interval& g : gaps) scale = std::max(scale, g.length());
    }
    std::vector<double> deltas;
    const int steps = 12;
    const double lo = std::min(1e-6, scale);
    for (int i = 0; i <= steps; ++i) deltas.push_back(lo * std::pow(scale / lo, static_cast<double>(i) / steps));

    auto update = [&](double x, double y) {
        if (!(y > x)) return;
        const double w = omega(y - x);
        if (!(w > 0.0)) return;
        out.F = std::max(out.F, std::abs(curve.derivative(Coord::F, m, y) - curve.derivative(Coord::F, m, x)) / w);
        out.G = std::max(out.G, std::abs(curve.derivative(Coord::G, m, y) - curve.derivative(Coord::G, m, x)) / w);
        out.H = std::max(out.H, std::abs(curve.derivative(Coord::H, m, y) - curve.derivative(Coord::H, m, x)) / w);
    };
    for (double x : xs)
        for (double d : deltas)
            if (x + d <= hull.hi) update(x, x + d);
    const std::size_t stride = std::max<std::size_t>(1, xs.size() / 64);
    for (std::size_t i = 0; i < xs.size(); i += stride)
        for (std::size_t j = i + stride; j < xs.size(); j += stride) update(xs[i], xs[j]);
    return out;
}

struct AssembleOptions {
    double horizontality_tol = 1e-9;  // relative, for refusing uncertified jets
    double weld_tol = 1e-8;           // relative endpoint mismatch
    int hull_samples = 5000;
    int seminorm_samples = 400;
    std::optional<double> C;           // overrides the constant derived from certification
    PerturbTolerances perturb;
};

struct GapReport {
    std::size_t index = 0;
    double a = 0.0;
    double b = 0.0;
    GapCase kind = GapCase::both_small;
    int subcase = 0;
    double lambda = 0.0;
    double A_script = 0.0;
    double V = 0.0;
    double goal_residual = 0.0;
    double height_residual = 0.0;       // from the perturbation integrals
    double lift_height_residual = 0.0;  // from the cached lift at b
    double weld_error = 0.0;
    double endpoint_flatness = 0.0;
    double bound_values_ratio = 0.0;
    double bound_modulus_ratio = 0.0;
};

struct VerificationReport {
    CertReport certificate;
    PerturbConstants constants;
    std::vector<GapReport> gaps;
    double weld_max_error = 0.0;
    double horizontality_max_residual = 0.0;  // relative, over the hull samples
    double height_max_residual = 0.0;
    double goal_max_residual = 0.0;
    SeminormEstimate seminorm;
    bool pass = true;
};

struct Assembly {
    PiecewiseCurve curve;
    VerificationReport report;
};

/// Horizontality residual |H' - 2 (F'G - G'F)| / (1 + |F'| + |G'|) at x.
inline double curve_horizontality(const PiecewiseCurve& c, double x) {
    const double F = c.value(Coord::F, x), G = c.value(Coord::G, x);
    const double F1 = c.derivative(Coord::F, 1, x), G1 = c.derivative(Coord::G, 1, x);
    const double H1 = c.derivative(Coord::H, 1, x);
    return std::abs(H1 - 2.0 * (F1 * G - G1 * F)) / (1.0 + std::abs(F1) + std::abs(G1));
}

/// Certify the jets, extend F and G across every gap, perturb so that each
/// lift lands on H(b), lift, weld, and verify the result.
inline Assembly assemble(const JetTriple& jt, const Modulus& omega, const AssembleOptions& opt = {}) {
    VerificationReport rep;
    rep.certificate = certify(jt, omega);
    const CertReport& cert = rep.certificate;
    if (!(cert.horizontality_max_relative <= opt.horizontality_tol))
        throw CertificationError("jets fail the horizontality identity: relative residual " +
                                 std::to_string(cert.horizontality_max_relative) + " at x = " +
                                 std::to_string(cert.worst_horizontality.a) + ", order " +
                                 std::to_string(cert.worst_horizontality.k));
    if (!std::isfinite(cert.whitney_constant()))
        throw CertificationError("jets are not a Whitney field for this modulus: infinite Whitney constant");
    if (!std::isfinite(cert.ratio_sup_omega))
        throw CertificationError("area discrepancy is not controlled by the velocity: infinite ratio");

    const auto gaps = jt.K->gaps();
    std::vector<GapProblem> problems(gaps.size());
    detail::parallel_chunks(
        gaps.size(),
        [&](std::size_t lo, std::size_t hi, std::size_t) {
            for (std::size_t i = lo; i < hi; ++i) problems[i] = make_gap_problem(jt, omega, i);
        },
        4);

    double C = std::max({1.0, cert.whitney_constant(), cert.ratio_sup_omega});
    for (const GapProblem& gp : problems)
        if (gp.V > 0.0) C = std::max(C, std::abs(gp.A_script) / gp.V);
    C *= 1.1;
    if (opt.C) C = std::max(1.0, *opt.C);
    rep.constants = perturb_constants(C, jt.m, jt.K->diameter());

    std::vector<std::optional<GapCurve>> built(gaps.size());
    detail::parallel_chunks(
        gaps.size(),
        [&](std::size_t lo, std::size_t hi, std::size_t) {
            for (std::size_t i = lo; i < hi; ++i) {
                const GapProblem& gp = problems[i];
                GapSolution sol = perturb_gap(gp, omega, rep.constants, opt.perturb);
                built[i].emplace(gp, std::move(sol), jt.F.value(0, gp.a), jt.G.value(0, gp.a),
                                 jt.H.value(0, gp.a));
            }
        },
        2);
    std::vector<GapCurve> pieces;
    for (auto& b : built) pieces.push_back(std::move(*b));
    Assembly out{PiecewiseCurve(jt, std::move(pieces)), {}};

    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const GapCurve& gc = out.curve.gaps()[i];
        const GapProblem& gp = problems[i];
        const GapSolution& s = gc.solution();
        GapReport g;
        g.index = i;
        g.a = gp.a;
        g.b = gp.b;
        g.kind = s.kind;
        g.subcase = s.subcase;
        g.lambda = std::isnan(s.lambda) ? 0.0 : s.lambda;
        g.A_script = gp.A_script;
        g.V = gp.V;
        g.goal_residual = s.goal_residual;
        g.height_residual = s.height_residual;
        g.endpoint_flatness = s.endpoint_flatness;
        g.bound_values_ratio = s.bound_values_ratio;
        g.bound_modulus_ratio = s.bound_modulus_ratio;
        const double hscale = std::max({1.0, gp.height_scale, std::abs(jt.H.value(0, gp.b))});
        g.lift_height_residual = std::abs(gc.lift_value(gp.b) - jt.H.value(0, gp.b)) / hscale;
        for (Coord c : {Coord::F, Coord::G, Coord::H}) {
            const JetFamily& fam = c == Coord::F ? jt.F : c == Coord::G ? jt.G : jt.H;
            for (int k = 0; k <= jt.m; ++k)
                for (double x : {gp.a, gp.b}) {
                    const double want = fam.value(k, x);
                    const double scale = (c == Coord::H && k == 0) ? hscale : 1.0 + std::abs(want);
                    g.weld_error = std::max(g.weld_error, std::abs(gc.derivative(c, k, x) - want) / scale);
                }
        }
        if (g.weld_error > opt.weld_tol)
            throw AssemblyError("lifted gap curve misses the jets at the gap endpoints: relative error " +
                                std::to_string(g.weld_error) + " on gap " + std::to_string(i));
        rep.weld_max_error = std::max(rep.weld_max_error, g.weld_error);
        rep.height_max_residual = std::max({rep.height_max_residual, g.height_residual, g.lift_height_residual});
        rep.goal_max_residual = std::max(rep.goal_max_residual, g.goal_residual);
        rep.gaps.push_back(g);
    }

    const Interval hull = jt.K->hull();
    const int n = std::max(2, opt.hull_samples);
    for (int i = 0; i < n; ++i) {
        const double x = hull.is_point() ? hull.lo : std::min(hull.hi, hull.lo + hull.length() * i / (n - 1));
        rep.horizontality_max_residual = std::max(rep.horizontality_max_residual, curve_horizontality(out.curve, x));
    }
    rep.seminorm = seminorm_estimate(out.curve, omega, std::max(2, opt.seminorm_samples));
    rep.pass = rep.weld_max_error <= opt.weld_tol && rep.horizontality_max_residual <= 1e-8 &&
               rep.height_max_residual <= opt.perturb.height && std::isfinite(rep.seminorm.max());
    out.report = std::move(rep);
    return out;
}

}  // namespace hwx
