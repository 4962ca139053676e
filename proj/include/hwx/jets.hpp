#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hwx/compact_set.hpp"
#include "hwx/error.hpp"
#include "hwx/poly.hpp"

namespace hwx {

inline constexpr int max_jet_order = 12;

/// Values F^k(x), k = 0..m, on one component of K.
class JetSource {
public:
    virtual ~JetSource() = default;
    virtual double value(int k, double x) const = 0;
    /// Points where the data is stored rather than derived (empty for closed forms).
    virtual std::vector<double> native_samples() const { return {}; }
};

using JetSourcePtr = std::shared_ptr<const JetSource>;

/// Closed form from a list of polynomials, one per order.
class PolyJet final : public JetSource {
public:
    explicit PolyJet(std::vector<Poly> orders) : orders_(std::move(orders)) {}

    /// F^k = D^k p.
    static std::shared_ptr<PolyJet> derivatives_of(const Poly& p, int m) {
        std::vector<Poly> orders;
        for (int k = 0; k <= m; ++k) orders.push_back(p.derivative(k));
        return std::make_shared<PolyJet>(std::move(orders));
    }

    double value(int k, double x) const override {
        if (k < 0 || static_cast<std::size_t>(k) >= orders_.size()) return 0.0;
        return orders_[static_cast<std::size_t>(k)](x);
    }

private:
    std::vector<Poly> orders_;
};

/// Closed form from a callable (k, x) -> F^k(x).
class FunctionJet final : public JetSource {
public:
    explicit FunctionJet(std::function<double(int, double)> fn) : fn_(std::move(fn)) {}
    double value(int k, double x) const override { return fn_(k, x); }

private:
    std::function<double(int, double)> fn_;
};

/// Dense samples: values[i][k] = F^k(xs[i]). Off-sample points use the
/// Taylor expansion of entries k..m from the nearest sample on the left
/// (the first sample for points left of the grid).
class SampleJet final : public JetSource {
public:
    SampleJet(std::vector<double> xs, std::vector<std::vector<double>> values)
        : xs_(std::move(xs)), values_(std::move(values)) {
        if (xs_.empty()) throw DomainError("sample jet needs at least one sample");
        if (xs_.size() != values_.size()) throw DomainError("sample jet: xs and values differ in length");
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            if (!std::isfinite(xs_[i])) throw DomainError("sample jet: non-finite sample point");
            if (i > 0 && !(xs_[i] > xs_[i - 1])) throw DomainError("sample jet: points must be strictly increasing");
            if (values_[i].size() != values_[0].size() || values_[i].empty())
                throw DomainError("sample jet: every point needs the same nonempty number of orders");
            for (double v : values_[i])
                if (!std::isfinite(v)) throw DomainError("sample jet: non-finite jet value");
        }
    }

    double value(int k, double x) const override {
        const int top = static_cast<int>(values_[0].size()) - 1;
        if (k < 0 || k > top) return 0.0;
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
        const auto& row = values_[i];
        if (xs_[i] == x) return row[static_cast<std::size_t>(k)];
        const double h = x - xs_[i];
        double term = 1.0;
        double s = 0.0;
        for (int j = 0; k + j <= top; ++j) {
            if (j > 0) term *= h / j;
            s += row[static_cast<std::size_t>(k + j)] * term;
        }
        return s;
    }

    std::vector<double> native_samples() const override { return xs_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<std::vector<double>>& values() const { return values_; }

private:
    std::vector<double> xs_;
    std::vector<std::vector<double>> values_;
};

/// c (at order 0 only) plus a linear combination of other sources.
class AffineJet final : public JetSource {
public:
    AffineJet(double constant, std::vector<std::pair<double, JetSourcePtr>> terms)
        : constant_(constant), terms_(std::move(terms)) {}

    double value(int k, double x) const override {
        CompensatedSum s;
        if (k == 0) s += constant_;
        for (const auto& [w, src] : terms_)
            if (w != 0.0) s += w * src->value(k, x);
        return s.value();
    }

    std::vector<double> native_samples() const override {
        std::vector<double> out;
        for (const auto& t : terms_) {
            auto v = t.second->native_samples();
            out.insert(out.end(), v.begin(), v.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    double constant_;
    std::vector<std::pair<double, JetSourcePtr>> terms_;
};

/// A jet (F^k)_{k=0..m} on a compact set, one source per component.
class JetFamily {
public:
    JetFamily() = default;
    JetFamily(std::shared_ptr<const CompactSet> K, int m, std::vector<JetSourcePtr> sources)
        : K_(std::move(K)), m_(m), sources_(std::move(sources)) {
        if (!K_) throw DomainError("jet family needs a compact set");
        if (m_ < 1 || m_ > max_jet_order)
            throw DomainError("jet order m must lie in [1, " + std::to_string(max_jet_order) + "]");
        if (sources_.size() != K_->size())
            throw DomainError("jet family needs exactly one source per component of K");
        for (std::size_t i = 0; i < sources_.size(); ++i) {
            if (!sources_[i]) throw DomainError("missing jet data on component " + std::to_string(i));
            for (double x : sources_[i]->native_samples())
                if (!(*K_)[i].contains(x))
                    throw DomainError("jet sample outside its component " + std::to_string(i));
        }
    }

    static JetFamily zero(std::shared_ptr<const CompactSet> K, int m) {
        return from_poly(std::move(K), m, Poly{});
    }
    static JetFamily from_poly(std::shared_ptr<const CompactSet> K, int m, const Poly& p) {
        const std::size_t n = K ? K->size() : 0;
        return JetFamily(std::move(K), m, std::vector<JetSourcePtr>(n, PolyJet::derivatives_of(p, m)));
    }
    static JetFamily from_function(std::shared_ptr<const CompactSet> K, int m,
                                   std::function<double(int, double)> fn) {
        const std::size_t n = K ? K->size() : 0;
        auto src = std::make_shared<FunctionJet>(std::move(fn));
        return JetFamily(std::move(K), m, std::vector<JetSourcePtr>(n, src));
    }

    int m() const { return m_; }
    const CompactSet& K() const { return *K_; }
    const std::shared_ptr<const CompactSet>& K_ptr() const { return K_; }
    const std::vector<JetSourcePtr>& sources() const { return sources_; }

    double value(int k, double x) const {
        if (k < 0 || k > m_) throw DomainError("jet order " + std::to_string(k) + " outside [0, m]");
        return sources_[component(x)]->value(k, x);
    }

    std::vector<double> jet(double x) const {
        const JetSource& s = *sources_[component(x)];
        std::vector<double> v(static_cast<std::size_t>(m_) + 1);
        for (int k = 0; k <= m_; ++k) v[static_cast<std::size_t>(k)] = s.value(k, x);
        return v;
    }

    /// Order-m Taylor polynomial at a, centered at a.
    Poly taylor(double a) const { return taylor_from_jet(jet(a), a); }

    /// T_a^{m-k} F^k evaluated at b.
    double taylor_remainder_base(int k, double a, double b) const {
        const std::vector<double> j = jet(a);
        const double h = b - a;
        double term = 1.0;
        CompensatedSum s;
        for (int i = 0; k + i <= m_; ++i) {
            if (i > 0) term *= h / i;
            s += j[static_cast<std::size_t>(k + i)] * term;
        }
        return s.value();
    }

    std::size_t component(double x) const {
        const auto c = K_->component_of(x);
        if (!c) throw DomainError("point " + std::to_string(x) + " is not in K");
        return *c;
    }

private:
    std::shared_ptr<const CompactSet> K_;
    int m_ = 0;
    std::vector<JetSourcePtr> sources_;
};

/// Jets of the three coordinates of a putative horizontal curve.
struct JetTriple {
    int m = 0;
    std::shared_ptr<const CompactSet> K;
    JetFamily F, G, H;

    JetTriple() = default;
    JetTriple(JetFamily f, JetFamily g, JetFamily h)
        : m(f.m()), K(f.K_ptr()), F(std::move(f)), G(std::move(g)), H(std::move(h)) {
        if (G.m() != m || H.m() != m) throw DomainError("jet triple: F, G, H must share the order m");
        if (G.K_ptr() != K || H.K_ptr() != K) throw DomainError("jet triple: F, G, H must share the set K");
    }

    /// Sample points of K: stored samples where available, otherwise the
    /// endpoints and `interior` equally spaced interior points per component.
    std::vector<double> points(int interior = 16) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < K->size(); ++i) {
            const Interval c = (*K)[i];
            std::vector<double> pts{c.lo, c.hi};
            bool native = false;
            for (const JetFamily* fam : {&F, &G, &H}) {
                auto s = fam->sources()[i]->native_samples();
                native = native || !s.empty();
                pts.insert(pts.end(), s.begin(), s.end());
            }
            if (!native && !c.is_point())
                for (int j = 1; j <= interior; ++j) pts.push_back(c.lo + c.length() * j / (interior + 1));
            out.insert(out.end(), pts.begin(), pts.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

/// Jets of the horizontal lift of a polynomial planar curve (f, g):
/// h = h(x0) + 2 int_{x0}^x (f'g - g'f), which is again a polynomial.
inline JetTriple polynomial_lift(std::shared_ptr<const CompactSet> K, int m, const Poly& f, const Poly& g,
                                 double x0 = 0.0, double h0 = 0.0) {
    const Poly integrand = 2.0 * (f.derivative() * g - g.derivative() * f);
    Poly h = integrand.recentered(x0).antiderivative() + Poly::constant(h0, x0);
    return JetTriple(JetFamily::from_poly(K, m, f), JetFamily::from_poly(K, m, g), JetFamily::from_poly(K, m, h));
}

inline std::shared_ptr<const CompactSet> make_set(std::vector<Interval> components) {
    return std::make_shared<const CompactSet>(std::move(components));
}

}  // namespace hwx
