#include <catch2/catch_amalgamated.hpp>

#include "hwx/poly.hpp"
#include "oracle.hpp"

#include <cmath>
#include <random>

using namespace hwx;
using Catch::Approx;

TEST_CASE("taylor_from_jet", "[poly]") {
    const std::vector<double> j1{1.0, 2.0};
    CHECK(taylor_from_jet(j1, 0.0).monomial() == std::vector<double>{1.0, 2.0});

    const std::vector<double> zero(4, 0.0);
    CHECK(taylor_from_jet(zero, 0.7).is_zero());

    const std::vector<double> ones{1.0, 1.0, 1.0};
    const Poly t = taylor_from_jet(ones, 1.0);
    const auto mono = t.monomial();
    REQUIRE(mono.size() == 3);
    CHECK(mono[0] == Approx(0.5));
    CHECK(mono[1] == Approx(0.0).margin(1e-15));
    CHECK(mono[2] == Approx(0.5));
    for (int k = 0; k <= 2; ++k) CHECK(t.derivative_at(k, 1.0) == Approx(1.0));

    CHECK_THROWS_AS(taylor_from_jet(std::vector<double>{}, 0.0), DomainError);
}

TEST_CASE("Taylor jets are reproduced by differentiation", "[poly][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + trial % 7;
        std::vector<double> jet(m + 1);
        for (double& v : jet) v = u(rng);
        const double a = u(rng);
        const Poly t = taylor_from_jet(jet, a);
        for (int k = 0; k <= m; ++k)
            REQUIRE(t.derivative_at(k, a) == Approx(jet[k]).epsilon(1e-12).margin(1e-13));
        // Monomial re-expansion evaluates to the same values.
        const Poly mono(t.monomial());
        REQUIRE(mono(a + 0.3) == Approx(t(a + 0.3)).epsilon(1e-9).margin(1e-10));
    }
}

TEST_CASE("polynomial arithmetic across origins", "[poly]") {
    const Poly p({1.0, 2.0}, 0.0);          // 1 + 2x
    const Poly q({0.0, 1.0}, 1.0);          // x - 1
    const Poly prod = p * q;                // 2x^2 - x - 1
    CHECK(prod(2.0) == Approx(5.0));
    CHECK((p + q)(3.0) == Approx(9.0));
    CHECK((p - q)(3.0) == Approx(5.0));
    CHECK(prod.recentered(-2.0)(0.5) == Approx(prod(0.5)));
    CHECK(Poly{}.is_zero());
    CHECK(Poly({1.0, 0.0, 0.0}).degree() == 0);
}

TEST_CASE("real roots", "[poly]") {
    // (x - 0.2)(x - 0.5)(x - 0.9)
    const Poly p = Poly({-0.2, 1.0}) * Poly({-0.5, 1.0}) * Poly({-0.9, 1.0});
    const auto r = real_roots(p, 0.0, 1.0);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == Approx(0.2).epsilon(1e-14));
    CHECK(r[1] == Approx(0.5).epsilon(1e-14));
    CHECK(r[2] == Approx(0.9).epsilon(1e-14));
    CHECK(real_roots(p, 0.3, 0.4).empty());
    CHECK(real_roots(Poly({1.0, 0.0, 1.0}), -5, 5).empty());
}

TEST_CASE("integral_abs", "[poly]") {
    CHECK(integral_abs(Poly({0.0, 1.0}), -1.0, 1.0) == Approx(1.0).epsilon(1e-15));
    const Poly p({-1.0, 0.0, 1.0});
    const double oracle = test::gk_integral([&](double x) { return std::abs(x * x - 1.0); }, 0.0, 2.0, {1.0});
    CHECK(oracle == Approx(2.0).epsilon(1e-13));
    CHECK(integral_abs(p, 0.0, 2.0) == Approx(oracle).epsilon(1e-13));
    CHECK(integral_abs(Poly{}, 0.3, 0.9) == 0.0);
    CHECK_THROWS_AS(integral_abs(p, 1.0, 1.0), DomainError);
}

TEST_CASE("max_abs", "[poly]") {
    const auto m1 = max_abs(Poly({-1.0, 0.0, 1.0}), 0.0, 2.0);
    CHECK(m1.value == Approx(3.0));
    CHECK(m1.argmax == 2.0);
    const auto m2 = max_abs(Poly::constant(-4.0), -1.0, 3.0);
    CHECK(m2.value == 4.0);
    CHECK(m2.argmax == -1.0);
    const auto m3 = max_abs(Poly({0.0, 1.0, -1.0}), 0.0, 1.0);
    CHECK(m3.value == Approx(0.25));
    CHECK(m3.argmax == Approx(0.5));
    CHECK_THROWS_AS(max_abs(Poly::constant(1.0), 2.0, 1.0), DomainError);
}

namespace {
void require_big_subinterval(const Poly& p, double a, double b) {
    const Interval I = big_subinterval(p, a, b);
    const double M = max_abs(p, a, b).value;
    const double d = std::max(1, p.degree());
    REQUIRE(I.lo >= a);
    REQUIRE(I.hi <= b);
    REQUIRE(I.length() >= (b - a) / (4.0 * d * d) * (1.0 - 1e-12));
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (int i = 0; i <= 1000; ++i) {
        const double v = p(I.lo + I.length() * i / 1000.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        REQUIRE(std::abs(v) >= M / 2 - 1e-9);
    }
    REQUIRE((lo > 0.0 || hi < 0.0));  // constant sign
}
}  // namespace

TEST_CASE("big_subinterval", "[poly]") {
    const Interval i1 = big_subinterval(Poly({0.0, 1.0}), 0.0, 1.0);
    CHECK(i1.lo == Approx(0.5));
    CHECK(i1.hi == 1.0);
    require_big_subinterval(Poly({0.0, 1.0}), 0.0, 1.0);

    const Interval i2 = big_subinterval(Poly::constant(5.0), -1.0, 2.0);
    CHECK(i2 == Interval{-1.0, 2.0});

    const Interval i3 = big_subinterval(Poly({-1.0, 0.0, 1.0}), 0.0, 2.0);
    CHECK(i3.lo >= std::sqrt(2.5) - 1e-12);
    CHECK(i3.hi <= 2.0);
    CHECK(i3.length() >= 0.125);
    require_big_subinterval(Poly({-1.0, 0.0, 1.0}), 0.0, 2.0);

    CHECK_THROWS_AS(big_subinterval(Poly{}, 0.0, 1.0), DegenerateInput);
}

TEST_CASE("integrate_product", "[poly]") {
    CHECK(integrate_product(Poly::constant(1.0), Poly({0.0, 1.0}), 0.0, 1.0) == Approx(0.5));
    CHECK(integrate_product(Poly({0.0, 1.0}), Poly({0.0, 1.0}), 0.0, 1.0) == Approx(1.0 / 3.0));
    const double v = integrate_product(Poly({1.0, 2.0}), Poly({3.0, -1.0}), 0.0, 2.0);
    const double oracle = test::gk_integral([](double x) { return (1 + 2 * x) * (3 - x); }, 0.0, 2.0);
    CHECK(oracle == Approx(32.0 / 3.0).epsilon(1e-14));
    CHECK(v == Approx(oracle).epsilon(1e-13));
    CHECK_THROWS_AS(integrate_product(Poly{}, Poly{}, 1.0, 0.0), DomainError);
}

TEST_CASE("Markov sandwich and big subintervals on random polynomials", "[poly][property]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(1, 6);
    for (int trial = 0; trial < 500; ++trial) {
        const int d = deg(rng);
        std::vector<double> c(d + 1);
        for (double& v : c) v = u(rng);
        if (c.back() == 0.0) c.back() = 1.0;
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) b = a + 0.5;
        const Poly p(c);
        const double M = max_abs(p, a, b).value;
        const double I = integral_abs(p, a, b);
        REQUIRE(M * (b - a) / (8.0 * d * d) <= I + 1e-9);
        REQUIRE(I <= M * (b - a) + 1e-9);
        REQUIRE(I >= std::abs(p.integrate(a, b)) - 1e-12);
        const double oracle = test::gk_integral([&](double x) { return std::abs(p(x)); }, a, b,
                                                real_roots(p, a, b));
        REQUIRE(I == Approx(oracle).epsilon(1e-10).margin(1e-10 * (1 + M) * (b - a)));
        require_big_subinterval(p, a, b);
    }
}
