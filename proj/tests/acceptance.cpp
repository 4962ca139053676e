// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include "scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace hwx;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = budget_s <= 0.0 || secs < budget_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

JetTriple random_triple(std::mt19937_64& rng, std::shared_ptr<const CompactSet> K, int m) {
    std::vector<JetSourcePtr> f, g, h;
    for (std::size_t i = 0; i < K->size(); ++i) {
        f.push_back(PolyJet::derivatives_of(test::random_poly(rng, m + 1), m));
        g.push_back(PolyJet::derivatives_of(test::random_poly(rng, m + 1), m));
        h.push_back(PolyJet::derivatives_of(test::random_poly(rng, m + 1), m));
    }
    return JetTriple(JetFamily(K, m, f), JetFamily(K, m, g), JetFamily(K, m, h));
}

Outcome whitney_bound() {
    double worst = 0.0;
    bool ok = true;
    for (int m : {1, 2})
        for (const Modulus& w : {Modulus::linear(), Modulus::power_law(0.5)}) {
            const CounterexampleReport r = verify_bounds(build_counterexample(m, w, 12), 1.0);
            const double bound = std::pow(4.0, m);
            ok = ok && r.whitney_constant <= bound;
            worst = std::max(worst, r.whitney_constant / bound);
        }
    return {ok, fmt("max Whitney constant / 4^m = %.6g", worst)};
}

Outcome ratio_bound() {
    double worst = 0.0;
    bool ok = true;
    for (int m : {1, 2})
        for (const Modulus& w : {Modulus::linear(), Modulus::power_law(0.5)}) {
            const CounterexampleReport r = verify_bounds(build_counterexample(m, w, 12), 1.0);
            const double bound = std::pow(16.0, m);
            ok = ok && r.ratio_sup <= bound * (1.0 + 1e-9);
            worst = std::max(worst, r.ratio_sup / bound);
        }
    return {ok, fmt("max |A|/(V1 omega) / 16^m = %.6g", worst)};
}

Outcome divergence() {
    const CounterexampleReport r = verify_bounds(build_counterexample(1, Modulus::linear(), 12), 1.0);
    bool ok = r.rows.size() >= 11;
    for (int n = 0; ok && n <= 10; ++n) {
        const DivergenceRow& row = r.rows[static_cast<std::size_t>(n)];
        ok = row.r >= 16.0 * 0.75 * std::ldexp(1.0, n + 2);
    }
    const double growth = ok ? r.rows[10].r / r.rows[0].r : 0.0;
    ok = ok && growth > 1e3;
    return {ok, fmt("r_0 = %.6g, r_10 = %.6g, r_10/r_0 = %.6g", ok ? r.rows[0].r : 0.0, ok ? r.rows[10].r : 0.0,
                    growth)};
}

Outcome markov() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(1, 6);
    int bad = 0;
    double worst_oracle = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const int d = deg(rng);
        std::vector<double> c(static_cast<std::size_t>(d) + 1);
        for (double& v : c) v = u(rng);
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) b = a + 0.5;
        const Poly p(c);
        const double M = max_abs(p, a, b).value;
        const double I = integral_abs(p, a, b);
        const double tol = 1e-9 * std::max(1.0, M * (b - a));
        if (M * (b - a) / (8.0 * d * d) > I + tol || I > M * (b - a) + tol) ++bad;
        const double oracle = test::gk_integral([&](double x) { return std::abs(p(x)); }, a, b, real_roots(p, a, b));
        worst_oracle = std::max(worst_oracle, std::abs(I - oracle) / std::max(1.0, oracle));
    }
    const bool ok = bad == 0 && worst_oracle <= 1e-9;
    std::ostringstream s;
    s << bad << " sandwich violations in 500; max |int|P| - oracle| = " << worst_oracle;
    return {ok, s.str()};
}

Outcome left_invariance() {
    std::mt19937_64 rng(12);
    const Modulus w = Modulus::linear();
    int done = 0;
    double worst = 0.0;
    while (done < 200) {
        auto K = test::random_set(rng, 4);
        const int m = 1 + done % 3;
        const JetTriple jt = random_triple(rng, K, m);
        const std::vector<double> pts = jt.points(4);
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        double a = pts[pick(rng)], b = pts[pick(rng)], base = pts[pick(rng)];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const JetTriple t = translate_left(jt, base);
        const PairFunctionals p = pair_functionals(jt, w, a, b), q = pair_functionals(t, w, a, b);
        const double scale = std::max(p.V_omega, 1e-300);
        worst = std::max(worst, std::abs(q.A - p.A) / std::max(std::abs(p.A), scale));
        worst = std::max(worst, std::abs(q.V_omega - p.V_omega) / scale);
        ++done;
    }
    return {worst <= 1e-10, fmt("max relative change of A, V = %.3g over 200 triples", worst)};
}

Outcome mollifier() {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Modulus ws[] = {Modulus::linear(), Modulus::power_law(0.5), Modulus::log_lipschitz()};
    int bad = 0, total = 0;
    double mid = HUGE_VAL, slope = HUGE_VAL;
    for (int trial = 0; trial < 50; ++trial) {
        const double a = 2.0 * u(rng), b = a + 0.01 + u(rng);
        const Modulus& w = ws[trial % 3];
        for (int m : {1, 2, 3}) {
            const PerturbConstants k = perturb_constants(1.0, m, 3.0);
            const double len = b - a, shortest = len / (18.0 * m * m);
            const double lo = a + u(rng) * (len - shortest);
            const double hi = lo + shortest + u(rng) * (b - lo - shortest);
            for (Interval J : {Interval{lo, std::min(b, hi)}, Interval{a, b}}) {
                const MollifierCheck c = check_mollifier(build_mollifier(J, a, b, w, m), a, b, w, m, k.C0, 2000);
                ++total;
                if (!c.pass()) ++bad;
                mid = std::min(mid, c.middle_third_margin);
                slope = std::min(slope, c.slope_margin);
            }
        }
    }
    std::ostringstream s;
    s << bad << " of " << total << " mollifiers fail; min middle-third margin " << mid << ", min slope margin "
      << slope;
    // The middle-third bound is attained with equality at the ends of the middle third.
    return {bad == 0 && mid >= 1.0 - 1e-12 && slope >= 1.0 - 1e-12, s.str()};
}

Outcome circle_extension() {
    const JetTriple jt = test::circle_lift(test::two_arcs(), 2);
    const Assembly as = assemble(jt, Modulus::linear());
    double jet_err = 0.0;
    for (double x : jt.points(64))
        for (int k = 0; k <= 2; ++k)
            for (Coord c : {Coord::F, Coord::G, Coord::H}) {
                const JetFamily& fam = c == Coord::F ? jt.F : c == Coord::G ? jt.G : jt.H;
                jet_err = std::max(jet_err, std::abs(as.curve.derivative(c, k, x) - fam.value(k, x)));
            }
    for (const GapCurve& g : as.curve.gaps())
        for (int k = 0; k <= 2; ++k)
            for (double x : {g.a(), g.b()}) {
                jet_err = std::max(jet_err, std::abs(g.derivative(Coord::F, k, x) - jt.F.value(k, x)));
                jet_err = std::max(jet_err, std::abs(g.derivative(Coord::G, k, x) - jt.G.value(k, x)));
                jet_err = std::max(jet_err, std::abs(g.derivative(Coord::H, k, x) - jt.H.value(k, x)));
            }
    const Interval hull = jt.K->hull();
    double horiz = 0.0;
    for (int i = 0; i < 5000; ++i)
        horiz = std::max(horiz, curve_horizontality(as.curve, std::min(hull.hi, hull.lo + hull.length() * i / 4999.0)));
    double height = 0.0;
    for (const GapReport& g : as.report.gaps) height = std::max({height, g.height_residual, g.lift_height_residual});
    const bool ok = as.report.pass && jet_err <= 1e-9 && horiz <= 1e-8 && height <= 1e-9;
    return {ok, fmt("jet error %.3g, horizontality %.3g, height residual %.3g", jet_err, horiz, height)};
}

Outcome goal_identity() {
    const std::vector<test::ConstructedGap> gaps = test::constructed_gaps();
    double worst = 0.0;
    for (const test::ConstructedGap& g : gaps) worst = std::max(worst, test::goal_oracle_residual(g.problem, g.solution));
    std::ostringstream s;
    s << gaps.size() << " constructed gaps, max relative residual " << worst;
    return {!gaps.empty() && worst <= 1e-9, s.str()};
}

Outcome reproduction() {
    std::mt19937_64 rng(14);
    const Modulus w = Modulus::linear();
    double ext_err = 0.0, curve_err = 0.0;
    int nonzero = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 4;
        auto K = test::random_set(rng, 2 + trial % 4);
        const Poly f = test::random_poly(rng, m), g = test::random_poly(rng, m);
        const JetTriple jt = polynomial_lift(K, m, f, g, K->hull().lo, 0.0);
        const Interval h = K->hull();
        const ExtendedField ef = extend_field(jt.F), eg = extend_field(jt.G);
        const Assembly as = assemble(jt, w);
        for (const GapCurve& gc : as.curve.gaps())
            if (!gc.solution().phi.is_zero() || !gc.solution().psi.is_zero()) ++nonzero;
        for (int i = 0; i <= 400; ++i) {
            const double x = std::min(h.hi, h.lo + h.length() * i / 400.0);
            ext_err = std::max({ext_err, std::abs(ef(x) - f(x)), std::abs(eg(x) - g(x))});
            curve_err = std::max({curve_err, std::abs(as.curve.value(Coord::F, x) - ef(x)),
                                  std::abs(as.curve.value(Coord::G, x) - eg(x))});
        }
    }
    std::ostringstream s;
    s << "extension error " << ext_err << ", |curve - extension| " << curve_err << ", " << nonzero
      << " gaps with nonzero perturbations";
    // phi = psi = 0 is structural; the curve adds F(a) to the extension of the translated
    // jets, so it agrees with the direct extension up to rounding.
    return {ext_err <= 1e-10 && curve_err <= 1e-10 && nonzero == 0, s.str()};
}

Outcome degenerate() {
    const Modulus w = Modulus::linear();
    std::ostringstream s;
    bool ok = true;

    // Zero jets with equal heights on K containing point components: the curve is the constant.
    {
        auto K = make_set({{0.0, 0.0}, {0.3, 0.6}, {0.8, 0.8}, {1.0, 1.0}});
        const Assembly as = assemble(test::stepped_heights(K, 1, {0.25, 0.25, 0.25, 0.25}), w);
        double err = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            err = std::max({err, std::abs(as.curve.value(Coord::F, x)), std::abs(as.curve.value(Coord::G, x)),
                            std::abs(as.curve.value(Coord::H, x) - 0.25)});
        }
        ok = ok && as.report.pass && err <= 1e-15;
        s << "constant curve error " << err;
    }
    // Zero planar jets with a height step on two points, m = 1: the lift closes the step.
    {
        auto K = make_set({{0.0, 0.0}, {1.0, 1.0}});
        const Assembly as = assemble(test::stepped_heights(K, 1, {0.0, 1e-3}), w);
        const double miss = std::abs(as.curve.value(Coord::H, 1.0) - 1e-3);
        const double start = std::abs(as.curve.value(Coord::H, 0.0));
        ok = ok && as.report.pass && miss <= 1e-12 && start == 0.0;
        s << "; height step miss " << miss;
    }
    // Affine planar data on points at m = 1 is reproduced with a vanishing certificate.
    {
        auto K = make_set({{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}});
        const JetTriple jt = polynomial_lift(K, 1, Poly({1.0, 2.0}), Poly({-1.0, 0.5}));
        const CertReport r = certify(jt, w);
        const Assembly as = assemble(jt, w);
        double err = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            err = std::max({err, std::abs(as.curve.value(Coord::F, x) - (1.0 + 2.0 * x)),
                            std::abs(as.curve.value(Coord::G, x) - (-1.0 + 0.5 * x))});
        }
        ok = ok && as.report.pass && err <= 1e-12 && r.whitney_F.constant <= 1e-12 && r.whitney_G.constant <= 1e-12;
        s << "; affine reproduction error " << err;
    }
    // A single point: nothing to extend.
    {
        auto K = make_set({{0.4, 0.4}});
        const Assembly as = assemble(test::stepped_heights(K, 1, {2.0}), w);
        ok = ok && as.report.pass && as.curve.gaps().empty() && as.curve.value(Coord::H, 0.4) == 2.0;
        s << "; single point ok";
    }
    return {ok, s.str()};
}

}  // namespace

int main() {
    run(1, "Whitney bound of the dyadic field", 5.0, whitney_bound);
    run(2, "ratio bound of the dyadic field", 5.0, ratio_bound);
    run(3, "divergence of the dyadic ratio", 1.0, divergence);
    run(4, "Markov sandwich", 10.0, markov);
    run(5, "left-invariance of A and V", 5.0, left_invariance);
    run(6, "mollifier certificate", 20.0, mollifier);
    run(7, "circle-lift extension", 30.0, circle_extension);
    run(8, "goal identity on constructed gaps", 0.0, goal_identity);
    run(9, "polynomial reproduction", 0.0, reproduction);
    run(10, "degenerate inputs", 0.0, degenerate);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
