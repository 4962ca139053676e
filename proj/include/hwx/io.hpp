#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwx/certify.hpp"
#include "hwx/counterexample.hpp"
#include "hwx/discrepancy.hpp"
#include "hwx/error.hpp"
#include "hwx/jets.hpp"
#include "hwx/lift.hpp"
#include "hwx/modulus.hpp"

namespace hwx {

using json = nlohmann::json;

namespace detail {

inline void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (!ok.count(item.key())) throw SchemaError(where + ": unknown field \"" + item.key() + "\"");
}

inline double get_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw SchemaError(where + ": missing field \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number()) throw SchemaError(where + ": field \"" + key + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(where + ": field \"" + key + "\" must be finite");
    return d;
}

inline std::vector<double> get_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw SchemaError(where + ": expected an array of numbers");
        out.push_back(e.get<double>());
        if (!std::isfinite(out.back())) throw SchemaError(where + ": non-finite number");
    }
    return out;
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

/// {"kind": "linear"} | {"kind": "power", "alpha": a} | {"kind": "log_lipschitz"}
/// | {"kind": "piecewise", "knots": [[t, w], ...]}, each with an optional
/// "exponent" e in (0, 1] giving omega^e.
inline Modulus parse_modulus(const json& j) {
    const std::string where = "omega";
    detail::require_keys(j, where, {"kind", "alpha", "knots", "exponent"});
    if (!j.contains("kind") || !j["kind"].is_string()) throw SchemaError("omega: missing string field \"kind\"");
    const std::string kind = j["kind"];
    Modulus w = Modulus::linear();
    try {
        if (kind == "linear") {
            if (j.contains("alpha") || j.contains("knots")) throw SchemaError("omega: linear takes no parameters");
        } else if (kind == "power") {
            if (j.contains("knots")) throw SchemaError("omega: power takes no knots");
            w = Modulus::power_law(detail::get_number(j, "alpha", where));
        } else if (kind == "log_lipschitz") {
            if (j.contains("alpha") || j.contains("knots")) throw SchemaError("omega: log_lipschitz takes no parameters");
            w = Modulus::log_lipschitz();
        } else if (kind == "piecewise") {
            if (j.contains("alpha")) throw SchemaError("omega: piecewise takes no alpha");
            if (!j.contains("knots") || !j["knots"].is_array()) throw SchemaError("omega: piecewise needs \"knots\"");
            std::vector<Modulus::Knot> knots;
            for (const json& k : j["knots"]) {
                const auto p = detail::get_numbers(k, "omega.knots");
                if (p.size() != 2) throw SchemaError("omega.knots: each knot is [t, w]");
                knots.emplace_back(p[0], p[1]);
            }
            w = Modulus::piecewise(std::move(knots));
        } else {
            throw SchemaError("omega: unknown kind \"" + kind + "\"");
        }
        if (j.contains("exponent")) w = power(w, detail::get_number(j, "exponent", where));
    } catch (const DomainError& e) {
        throw SchemaError(std::string("omega: ") + e.what());
    }
    return w;
}

/// Shorthand used on the command line: linear, log_lipschitz, power:<alpha>, or a JSON fragment.
inline Modulus parse_modulus_arg(const std::string& s) {
    if (s == "linear") return Modulus::linear();
    if (s == "log_lipschitz") return Modulus::log_lipschitz();
    if (s.rfind("power:", 0) == 0) {
        try {
            return parse_modulus(json{{"kind", "power"}, {"alpha", std::stod(s.substr(6))}});
        } catch (const std::logic_error&) {
            throw SchemaError("omega: cannot parse exponent in \"" + s + "\"");
        }
    }
    try {
        return parse_modulus(json::parse(s));
    } catch (const json::exception&) {
        throw SchemaError("omega: expected linear, log_lipschitz, power:<alpha> or a JSON object");
    }
}

inline json to_json(const Modulus& w) {
    json j;
    switch (w.kind()) {
        case Modulus::Kind::linear: j["kind"] = "linear"; break;
        case Modulus::Kind::power: j["kind"] = "power"; j["alpha"] = w.alpha(); break;
        case Modulus::Kind::log_lipschitz: j["kind"] = "log_lipschitz"; break;
        case Modulus::Kind::piecewise: {
            j["kind"] = "piecewise";
            json knots = json::array();
            for (const auto& [t, v] : w.knots()) knots.push_back({t, v});
            j["knots"] = knots;
            break;
        }
    }
    if (w.exponent() != 1.0) j["exponent"] = w.exponent();
    return j;
}

struct Job {
    int m = 1;
    Modulus omega = Modulus::linear();
    JetTriple jets;
};

namespace detail {

inline JetSourcePtr parse_jet_entry(const json& e, const Interval& comp, int m, const std::string& where) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "poly") {
        require_keys(e, where, {"component_index", "kind", "coeffs", "orders", "origin"});
        const double origin = e.contains("origin") ? get_number(e, "origin", where) : 0.0;
        if (e.contains("coeffs") == e.contains("orders"))
            throw SchemaError(where + ": poly jets need exactly one of \"coeffs\" or \"orders\"");
        if (e.contains("coeffs"))
            return PolyJet::derivatives_of(Poly(get_numbers(e["coeffs"], where + ".coeffs"), origin), m);
        if (!e["orders"].is_array() || e["orders"].size() != static_cast<std::size_t>(m) + 1)
            throw SchemaError(where + ": \"orders\" must list m + 1 coefficient arrays");
        std::vector<Poly> orders;
        for (const json& o : e["orders"]) orders.emplace_back(get_numbers(o, where + ".orders"), origin);
        return std::make_shared<PolyJet>(std::move(orders));
    }
    if (kind == "samples") {
        require_keys(e, where, {"component_index", "kind", "x", "values"});
        if (!e.contains("x") || !e.contains("values")) throw SchemaError(where + ": samples need \"x\" and \"values\"");
        const std::vector<double> xs = get_numbers(e["x"], where + ".x");
        if (!e["values"].is_array() || e["values"].size() != xs.size())
            throw SchemaError(where + ": \"values\" must have one row per sample point");
        std::vector<std::vector<double>> rows;
        for (const json& r : e["values"]) {
            rows.push_back(get_numbers(r, where + ".values"));
            if (rows.back().size() != static_cast<std::size_t>(m) + 1)
                throw SchemaError(where + ": each sample row needs m + 1 jet values");
        }
        for (double x : xs)
            if (!comp.contains(x)) throw SchemaError(where + ": sample point outside its component");
        try {
            return std::make_shared<SampleJet>(xs, std::move(rows));
        } catch (const DomainError& err) {
            throw SchemaError(where + ": " + err.what());
        }
    }
    throw SchemaError(where + ": unknown jet kind \"" + kind + "\"");
}

}  // namespace detail

/// Parse a job: {"m", "omega", "K": [{"a", "b"}], "jets": {"F", "G", "H"}},
/// with one entry per component in each jet list. Unknown fields are rejected.
inline Job parse_job(const json& j) {
    detail::require_keys(j, "job", {"m", "omega", "K", "jets"});
    for (const char* key : {"m", "omega", "K", "jets"})
        if (!j.contains(key)) throw SchemaError(std::string("job: missing field \"") + key + "\"");
    if (!j["m"].is_number_integer()) throw SchemaError("job: \"m\" must be an integer");
    Job job;
    job.m = j["m"].get<int>();
    if (job.m < 1 || job.m > max_jet_order)
        throw SchemaError("job: \"m\" must lie in [1, " + std::to_string(max_jet_order) + "]");
    job.omega = parse_modulus(j["omega"]);

    if (!j["K"].is_array() || j["K"].empty()) throw SchemaError("job: \"K\" must be a nonempty array");
    std::vector<Interval> comps;
    for (const json& c : j["K"]) {
        detail::require_keys(c, "K", {"a", "b"});
        comps.push_back({detail::get_number(c, "a", "K"), detail::get_number(c, "b", "K")});
    }
    std::shared_ptr<const CompactSet> K;
    try {
        K = make_set(std::move(comps));
    } catch (const DomainError& e) {
        throw SchemaError(std::string("K: ") + e.what());
    }

    detail::require_keys(j["jets"], "jets", {"F", "G", "H"});
    std::vector<JetFamily> fams;
    for (const char* name : {"F", "G", "H"}) {
        const std::string where = std::string("jets.") + name;
        if (!j["jets"].contains(name) || !j["jets"][name].is_array())
            throw SchemaError(where + ": missing array");
        std::vector<JetSourcePtr> sources(K->size());
        for (const json& e : j["jets"][name]) {
            if (!e.is_object() || !e.contains("component_index") || !e["component_index"].is_number_integer() ||
                !e.contains("kind") || !e["kind"].is_string())
                throw SchemaError(where + ": entries need integer \"component_index\" and string \"kind\"");
            const long idx = e["component_index"].get<long>();
            if (idx < 0 || static_cast<std::size_t>(idx) >= K->size())
                throw SchemaError(where + ": component_index out of range");
            if (sources[static_cast<std::size_t>(idx)])
                throw SchemaError(where + ": duplicate entry for component " + std::to_string(idx));
            sources[static_cast<std::size_t>(idx)] = detail::parse_jet_entry(
                e, (*K)[static_cast<std::size_t>(idx)], job.m, where + "[" + std::to_string(idx) + "]");
        }
        for (std::size_t i = 0; i < sources.size(); ++i)
            if (!sources[i]) throw SchemaError(where + ": missing jet data on component " + std::to_string(i));
        fams.emplace_back(K, job.m, std::move(sources));
    }
    job.jets = JetTriple(fams[0], fams[1], fams[2]);
    return job;
}

inline Job load_job(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open job file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("job file is not valid JSON: ") + e.what());
    }
    return parse_job(j);
}

inline json to_json(const WorstPair& p) {
    json j{{"a", p.a}, {"b", p.b}, {"value", detail::finite_or_null(p.value)}};
    if (p.k >= 0) j["k"] = p.k;
    return j;
}

inline json to_json(const CertReport& r) {
    auto whitney = [](const CertReport::Whitney& w) {
        json per = json::array();
        for (double v : w.per_order) per.push_back(detail::finite_or_null(v));
        return json{{"constant", detail::finite_or_null(w.constant)}, {"per_order", per}, {"worst", to_json(w.worst)}};
    };
    return json{{"whitney_constants",
                 {{"F", whitney(r.whitney_F)}, {"G", whitney(r.whitney_G)}, {"H", whitney(r.whitney_H)},
                  {"aggregate", detail::finite_or_null(r.whitney_constant())}}},
                {"horizontality_max_residual", r.horizontality_max_residual},
                {"horizontality_max_relative", r.horizontality_max_relative},
                {"ratio_sup_omega", detail::finite_or_null(r.ratio_sup_omega)},
                {"ratio_sup_one_scaled", detail::finite_or_null(r.ratio_sup_one_scaled)},
                {"pair_count", r.pair_count},
                {"point_count", r.point_count},
                {"worst_pairs",
                 {{"whitney_F", to_json(r.whitney_F.worst)},
                  {"whitney_G", to_json(r.whitney_G.worst)},
                  {"whitney_H", to_json(r.whitney_H.worst)},
                  {"horizontality", to_json(r.worst_horizontality)},
                  {"ratio_omega", to_json(r.worst_ratio_omega)},
                  {"ratio_one_scaled", to_json(r.worst_ratio_one_scaled)}}}};
}

inline json to_json(const PerturbConstants& k) {
    return json{{"C", k.C}, {"C0_hat", k.C0_hat}, {"C0", k.C0}, {"B", k.B}, {"C1", k.C1}, {"C_tilde", k.C_tilde}};
}

inline json to_json(const VerificationReport& r) {
    json gaps = json::array();
    for (const GapReport& g : r.gaps)
        gaps.push_back({{"index", g.index},
                        {"a", g.a},
                        {"b", g.b},
                        {"case", to_string(g.kind)},
                        {"subcase", g.subcase},
                        {"lambda", g.lambda},
                        {"A_script", g.A_script},
                        {"V", g.V},
                        {"goal_residual", g.goal_residual},
                        {"height_residual", g.height_residual},
                        {"lift_height_residual", g.lift_height_residual},
                        {"weld_error", g.weld_error},
                        {"endpoint_flatness", g.endpoint_flatness},
                        {"bound_values_ratio", g.bound_values_ratio},
                        {"bound_modulus_ratio", g.bound_modulus_ratio}});
    return json{{"pass", r.pass},
                {"certificate", to_json(r.certificate)},
                {"constants", to_json(r.constants)},
                {"gaps", gaps},
                {"weld_max_error", r.weld_max_error},
                {"horizontality_max_residual", r.horizontality_max_residual},
                {"height_max_residual", r.height_max_residual},
                {"goal_max_residual", r.goal_max_residual},
                {"seminorm", {{"F", r.seminorm.F}, {"G", r.seminorm.G}, {"H", r.seminorm.H}, {"max", r.seminorm.max()}}}};
}

inline json to_json(const CounterexampleReport& r, const CounterexampleData& d) {
    return json{{"m", d.m},
                {"omega", to_json(d.omega)},
                {"n_max", d.n_max},
                {"alpha", r.alpha},
                {"pass", r.pass()},
                {"whitney_constant", r.whitney_constant},
                {"whitney_bound", r.whitney_bound},
                {"whitney_pass", r.whitney_pass},
                {"whitney_worst", to_json(r.whitney_worst)},
                {"ratio_sup_one_scaled", r.ratio_sup},
                {"ratio_bound", r.ratio_bound},
                {"ratio_pass", r.ratio_pass},
                {"ratio_worst", to_json(r.ratio_worst)},
                {"horizontality_max_residual", r.horizontality_max_residual},
                {"pair_count", r.pair_count},
                {"divergence_asserted", r.asserted_divergence},
                {"lower_bounds_pass", r.lower_bounds_pass},
                {"monotone_pass", r.monotone_pass},
                {"burn_in", r.burn_in}};
}

/// Comma-separated row with 17 significant digits, enough to round-trip a double.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) {
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            write(values[i]);
        }
        out_ << '\n';
    }
    template <class... Cells>
    void mixed(const Cells&... cells) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : ""), write(cells)), ...);
        out_ << '\n';
    }

private:
    void write(double v) {
        if (std::isnan(v))
            out_ << "nan";
        else if (std::isinf(v))
            out_ << (v > 0 ? "inf" : "-inf");
        else
            out_ << v;
    }
    void write(int v) { out_ << v; }
    void write(std::size_t v) { out_ << v; }
    void write(const std::string& s) { out_ << s; }
    void write(const char* s) { out_ << s; }

    std::ostream& out_;
};

}  // namespace hwx
