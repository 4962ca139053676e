#include <catch2/catch_amalgamated.hpp>

#include "scenarios.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

using namespace hwx;
using Catch::Approx;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// D^i exp(-1/(1-x^2)) in 50-digit arithmetic by forward-mode Taylor arithmetic:
// propagate the Taylor coefficients of u = 1 - x^2, v = -1/u, then exp(v).
double bump_reference(int i, double x0) {
    const int n = i + 1;
    std::vector<big> u(n, big(0)), v(n, big(0)), e(n, big(0));
    const big x = x0;
    u[0] = 1 - x * x;
    if (n > 1) u[1] = -2 * x;
    if (n > 2) u[2] = -1;
    // w = 1/u by the recurrence w_k = -(sum_{j>=1} u_j w_{k-j}) / u_0.
    std::vector<big> w(n, big(0));
    w[0] = 1 / u[0];
    for (int k = 1; k < n; ++k) {
        big s = 0;
        for (int j = 1; j <= k; ++j) s += u[j] * w[k - j];
        w[k] = -s / u[0];
    }
    for (int k = 0; k < n; ++k) v[k] = -w[k];
    // e = exp(v): k e_k = sum_{j=1}^k j v_j e_{k-j}.
    e[0] = exp(v[0]);
    for (int k = 1; k < n; ++k) {
        big s = 0;
        for (int j = 1; j <= k; ++j) s += j * v[j] * e[k - j];
        e[k] = s / k;
    }
    big fact = 1;
    for (int k = 2; k <= i; ++k) fact *= k;
    return static_cast<double>(e[i] * fact);
}

}  // namespace

TEST_CASE("bump derivatives", "[whitney]") {
    CHECK(bump_derivative(0, 0.0) == Approx(0.36787944117).epsilon(1e-11));
    for (int i = 0; i <= detail::max_bump_order; ++i) {
        CHECK(bump_derivative(i, 1.0) == 0.0);
        CHECK(bump_derivative(i, -1.0) == 0.0);
        CHECK(bump_derivative(i, 1.5) == 0.0);
    }
    CHECK(bump_derivative(1, 0.0) == 0.0);
    for (int i = 0; i <= detail::max_bump_order; ++i)
        for (double x : {-0.93, -0.5, -0.1, 0.0, 0.27, 0.61, 0.88}) {
            const double ref = bump_reference(i, x);
            const double scale = std::max(std::abs(ref), 1e-12 * bump_sup_norm(i));
            CHECK(std::abs(bump_derivative(i, x) - ref) <= 1e-11 * scale);
        }
    // Parity: D^i phi(-x) = (-1)^i D^i phi(x).
    for (int i = 0; i <= 6; ++i)
        CHECK(bump_derivative(i, -0.4) == Approx((i % 2 ? -1.0 : 1.0) * bump_derivative(i, 0.4)));
}

TEST_CASE("bump integrals", "[whitney]") {
    const double mass = test::gk_integral([](double x) { return bump_derivative(0, x); }, -1.0, 1.0, {0.0});
    CHECK(bump_mass() == Approx(mass).epsilon(1e-13));
    CHECK(bump_mass() == Approx(0.443993816168079).epsilon(1e-13));
    for (double s : {-1.0, -0.9, -0.3, 0.0, 0.45, 0.99, 1.0}) {
        const double ref = test::gk_integral([](double x) { return bump_derivative(0, x); }, -1.0, s, {0.0});
        CHECK(bump_integral(s) == Approx(ref).margin(1e-15));
        CHECK(bump_tail_fraction(s) == Approx(1.0 - ref / mass).margin(1e-14));
    }
    CHECK(bump_sup_norm(0) == Approx(std::exp(-1.0)));
    const double sup1 = test::sampled_sup([](double x) { return bump_derivative(1, x); }, -1.0, 1.0, 200000);
    CHECK(bump_sup_norm(1) == Approx(sup1).epsilon(1e-8));
}

TEST_CASE("gap extension from endpoint jets", "[whitney]") {
    SECTION("polynomial reproduction") {
        std::mt19937_64 rng(3);
        for (int m = 1; m <= 6; ++m) {
            const Poly p = test::random_poly(rng, m);
            std::vector<double> ja, jb;
            for (int k = 0; k <= m; ++k) {
                ja.push_back(p.derivative_at(k, 0.2));
                jb.push_back(p.derivative_at(k, 0.9));
            }
            const WhitneyPiece w = whitney_extend_gap(ja, jb, 0.2, 0.9);
            for (int i = 0; i <= 50; ++i) {
                const double x = 0.2 + 0.7 * i / 50.0;
                for (int k = 0; k <= m; ++k) CHECK(w.derivative(k, x) == Approx(p.derivative_at(k, x)).margin(1e-10));
            }
        }
    }
    SECTION("zero jets") {
        const std::vector<double> z(4, 0.0);
        const WhitneyPiece w = whitney_extend_gap(z, z, -1.0, 2.0);
        for (double x : {-1.0, 0.0, 0.5, 2.0}) CHECK(w(x) == 0.0);
    }
    SECTION("matches jets at the endpoints to every order") {
        const std::vector<double> ja{1.0, -2.0, 0.5, 3.0}, jb{0.0, 1.0, -1.0, 2.0};
        const WhitneyPiece w = whitney_extend_gap(ja, jb, 0.0, 0.5);
        for (int k = 0; k <= 3; ++k) {
            CHECK(w.derivative(k, 0.0) == Approx(ja[k]).margin(1e-14));
            CHECK(w.derivative(k, 0.5) == Approx(jb[k]).margin(1e-14));
        }
        // Beyond order m the jet ends: D^{m+1} is the blend contribution only, flat at the ends.
        CHECK(w.derivative(4, 0.0) == Approx(0.0).margin(1e-12));
    }
    SECTION("derivatives agree with finite differences") {
        const std::vector<double> ja{1.0, -2.0, 0.5}, jb{0.0, 1.0, -1.0};
        const WhitneyPiece w = whitney_extend_gap(ja, jb, 0.0, 1.0);
        for (double x : {0.13, 0.37, 0.5, 0.62, 0.91})
            for (int k = 1; k <= 3; ++k) {
                const double fd = test::central_difference([&](double y) { return w.derivative(k - 1, y); }, x, 1e-6, 1);
                CHECK(w.derivative(k, x) == Approx(fd).epsilon(1e-6).margin(1e-6));
            }
    }
    SECTION("sin on [0, 1], m = 2") {
        const std::vector<double> ja{0.0, 1.0, 0.0}, jb{std::sin(1.0), std::cos(1.0), -std::sin(1.0)};
        const WhitneyPiece w = whitney_extend_gap(ja, jb, 0.0, 1.0);
        const double err = test::sampled_sup([&](double x) { return w(x) - std::sin(x); }, 0.0, 1.0, 4000);
        CHECK(err <= 0.02);
    }
    SECTION("errors") {
        const std::vector<double> j{0.0, 1.0};
        CHECK_THROWS_AS(whitney_extend_gap(j, j, 1.0, 1.0), DomainError);
        CHECK_THROWS_AS(whitney_extend_gap(j, j, 2.0, 1.0), DomainError);
    }
}

TEST_CASE("extended field on K", "[whitney]") {
    SECTION("single component returns the jets") {
        auto K = make_set({{0.0, 2.0}});
        const JetFamily F = JetFamily::from_function(K, 2, [](int k, double x) { return k == 0 ? std::exp(x) : std::exp(x); });
        const ExtendedField e = extend_field(F);
        CHECK(e.pieces().empty());
        for (double x : {0.0, 0.7, 2.0})
            for (int k = 0; k <= 2; ++k) CHECK(e.derivative(k, x) == F.value(k, x));
    }
    SECTION("global polynomials are reproduced on the hull") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            const int m = 1 + trial % 4;
            auto K = test::random_set(rng, 4);
            const Poly p = test::random_poly(rng, m);
            const ExtendedField e = extend_field(JetFamily::from_poly(K, m, p));
            const Interval h = K->hull();
            for (int i = 0; i <= 200; ++i) {
                const double x = std::min(h.hi, h.lo + h.length() * i / 200.0);
                CHECK(e(x) == Approx(p(x)).margin(1e-10));
            }
        }
    }
    SECTION("continuity across the weld points") {
        const JetTriple jt = test::circle_lift(test::two_arcs(), 2);
        const ExtendedField e = extend_field(jt.F);
        for (int k = 0; k <= 2; ++k) {
            CHECK(e.derivative(k, 0.5 + 1e-9) == Approx(jt.F.value(k, 0.5)).margin(1e-7));
            CHECK(e.derivative(k, 1.0 - 1e-9) == Approx(jt.F.value(k, 1.0)).margin(1e-7));
        }
    }
}
