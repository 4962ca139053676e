#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hwx/bump.hpp"
#include "hwx/compact_set.hpp"
#include "hwx/error.hpp"
#include "hwx/jets.hpp"
#include "hwx/poly.hpp"

namespace hwx {

/// Blend (1 - theta) T_a + theta T_b on [a, b], where theta is the
/// normalized cumulative bump rescaled to [a, b]. theta and all its
/// derivatives are flat at both ends, so the piece reproduces the jet at a
/// and the jet at b to every order.
class WhitneyPiece {
public:
    WhitneyPiece() = default;
    WhitneyPiece(Poly Ta, Poly Tb, double a, double b)
        : Ta_(std::move(Ta)), Tb_(std::move(Tb)), a_(a), b_(b) {
        if (!(a < b)) throw DomainError("whitney piece needs a < b");
        Ta_ = Ta_.recentered(a);
        Tb_ = Tb_.recentered(b);
        diff_a_ = Tb_.recentered(a) - Ta_;
        diff_b_ = Tb_ - Ta_.recentered(b);
        for (const Poly* p : {&Ta_, &Tb_, &diff_a_, &diff_b_}) {
            std::vector<Poly> d{*p};
            while (!d.back().is_zero()) d.push_back(d.back().derivative());
            derivs_.push_back(std::move(d));
        }
    }

    double a() const { return a_; }
    double b() const { return b_; }
    const Poly& taylor_left() const { return Ta_; }
    const Poly& taylor_right() const { return Tb_; }

    /// theta^{(j)}(x) for j >= 0.
    double blend(int j, double x) const {
        const double s = (2.0 * x - a_ - b_) / (b_ - a_);
        if (j == 0) return bump_integral(s) / bump_mass();
        return bump_derivative(j - 1, s) * std::pow(2.0 / (b_ - a_), j) / bump_mass();
    }

    /// Blend weights at x up to order `kmax`: w[0] is theta on the left half
    /// and theta - 1 on the right half, w[j] = theta^{(j)}. They depend only on
    /// the gap, so pieces on the same gap can share them.
    struct Weights {
        double x = 0.0;
        bool left = true;
        int kmax = -1;
        std::array<double, max_jet_order + 2> w{};
    };

    Weights weights(int kmax, double x) const {
        if (kmax < 0 || kmax > max_jet_order + 1) throw DomainError("whitney piece: weight order out of range");
        Weights out;
        out.x = x;
        out.kmax = kmax;
        const double s = (2.0 * x - a_ - b_) / (b_ - a_);
        out.left = s <= 0.0;
        out.w[0] = out.left ? bump_integral(s) / bump_mass() : -bump_tail_fraction(s);
        for (int j = 1; j <= kmax; ++j) out.w[static_cast<std::size_t>(j)] = blend(j, x);
        return out;
    }

    /// D^k of the piece by the Leibniz rule. The left half expands around
    /// T_a and the right half around T_b, so endpoint values carry no
    /// cancellation from the blend.
    double derivative(int k, double x) const {
        if (k < 0) throw DomainError("whitney piece: negative derivative order");
        const double s = (2.0 * x - a_ - b_) / (b_ - a_);
        const bool left = s <= 0.0;
        return leibniz(k, x, left, [&](int j) {
            if (j == 0) return left ? bump_integral(s) / bump_mass() : -bump_tail_fraction(s);
            return blend(j, x);
        });
    }

    /// Same as derivative(k, w.x), with precomputed weights.
    double derivative(int k, const Weights& w) const {
        if (k < 0 || k > w.kmax) throw DomainError("whitney piece: weights do not cover this order");
        return leibniz(k, w.x, w.left, [&](int j) { return w.w[static_cast<std::size_t>(j)]; });
    }

    double operator()(double x) const { return derivative(0, x); }

private:
    template <class Weight>
    double leibniz(int k, double x, bool left, Weight&& weight) const {
        const std::vector<Poly>& base = derivs_[left ? 0 : 1];
        const std::vector<Poly>& diff = derivs_[left ? 2 : 3];
        auto at = [x](const std::vector<Poly>& d, int order) {
            return static_cast<std::size_t>(order) < d.size() ? d[static_cast<std::size_t>(order)](x) : 0.0;
        };
        CompensatedSum sum;
        sum += at(base, k);
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
            if (j > 0) binom = binom * (k - j + 1) / j;
            const double d = at(diff, k - j);
            if (d == 0.0) continue;
            const double w = weight(j);
            if (w == 0.0) continue;
            sum += binom * w * d;
        }
        return sum.value();
    }

    Poly Ta_, Tb_;
    Poly diff_a_, diff_b_;  // T_b - T_a centered at a and at b
    std::vector<std::vector<Poly>> derivs_;  // derivatives of Ta, Tb, diff_a, diff_b down to zero
    double a_ = 0.0;
    double b_ = 1.0;
};

/// Extension across a gap from the order-m jets at its endpoints.
inline WhitneyPiece whitney_extend_gap(std::span<const double> jet_left, std::span<const double> jet_right,
                                       double a, double b) {
    if (!(a < b)) throw DomainError("whitney_extend_gap needs a < b");
    if (jet_left.size() != jet_right.size() || jet_left.empty())
        throw DomainError("whitney_extend_gap: endpoint jets must have the same nonempty length");
    return WhitneyPiece(taylor_from_jet(jet_left, a), taylor_from_jet(jet_right, b), a, b);
}

/// A jet family extended to the hull of K: jet values on K, blends on the gaps.
class ExtendedField {
public:
    ExtendedField() = default;
    explicit ExtendedField(JetFamily jets) : jets_(std::move(jets)) {
        for (const Interval& g : jets_.K().gaps())
            pieces_.push_back(whitney_extend_gap(jets_.jet(g.lo), jets_.jet(g.hi), g.lo, g.hi));
    }

    const JetFamily& jets() const { return jets_; }
    const std::vector<WhitneyPiece>& pieces() const { return pieces_; }
    const WhitneyPiece& piece(std::size_t gap) const { return pieces_.at(gap); }

    /// D^k at x in the hull; points of K read the jets, so 0 <= k <= m there.
    double derivative(int k, double x) const {
        if (jets_.K().contains(x)) return jets_.value(k, x);
        const auto g = jets_.K().gap_of(x);
        if (!g) throw DomainError("point " + std::to_string(x) + " lies outside the hull of K");
        return pieces_[*g].derivative(k, x);
    }
    double operator()(double x) const { return derivative(0, x); }

private:
    JetFamily jets_;
    std::vector<WhitneyPiece> pieces_;
};

inline ExtendedField extend_field(const JetFamily& jets) { return ExtendedField(jets); }

}  // namespace hwx
