// hwx: certify jets, build horizontal extensions, sweep pair functionals and
// reproduce the divergent counterexample from the command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "hwx/hwx.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { ok = 0, internal = 1, usage = 2, refused = 3, construction = 4, verification = 5 };

struct Options {
    std::string job;
    std::string out = ".";
    std::size_t pairs = 20000;
    int nmax = 12;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    int m = 1;
    std::string omega = "linear";
    int samples = 401;
    bool random_pairs = false;
};

std::string quote(const std::string& s) {
    std::string q;
    for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += (c == '\n') ? ' ' : c;
    }
    return q;
}

int fail(const char* kind, const std::string& reason, int code) {
    std::cerr << "hwx: error=" << kind << " reason=\"" << quote(reason) << "\"\n";
    return code;
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw hwx::SchemaError("cannot write " + p.string());
    return f;
}

void write_json(const fs::path& p, const hwx::json& j) { open_out(p) << j.dump(2) << '\n'; }

bool certified(const hwx::CertReport& r, double tol) {
    return r.horizontality_max_relative <= tol && std::isfinite(r.whitney_constant()) &&
           std::isfinite(r.ratio_sup_omega);
}

int run_certify(const Options& o) {
    const hwx::Job job = hwx::load_job(o.job);
    const hwx::CertReport rep =
        hwx::certify(job.jets, job.omega, hwx::default_pair_grid(job.jets, 16, o.pairs));
    const fs::path dir = prepare_out(o.out);
    hwx::json j = hwx::to_json(rep);
    j["certified"] = certified(rep, o.tol);
    j["horizontality_tol"] = o.tol;
    write_json(dir / "cert_report.json", j);

    std::ofstream csv = open_out(dir / "worst_pairs.csv");
    hwx::CsvWriter w(csv, {"quantity", "a", "b", "value", "k"});
    auto row = [&](const char* name, const hwx::WorstPair& p) { w.mixed(std::string(name), p.a, p.b, p.value, p.k); };
    row("whitney_F", rep.whitney_F.worst);
    row("whitney_G", rep.whitney_G.worst);
    row("whitney_H", rep.whitney_H.worst);
    row("horizontality", rep.worst_horizontality);
    row("ratio_omega", rep.worst_ratio_omega);
    row("ratio_one_scaled", rep.worst_ratio_one_scaled);

    if (!certified(rep, o.tol))
        return fail("certification", "jets are not certified: relative horizontality residual " +
                                         std::to_string(rep.horizontality_max_relative) + ", Whitney constant " +
                                         std::to_string(rep.whitney_constant()),
                    refused);
    return ok;
}

int run_extend(const Options& o) {
    const hwx::Job job = hwx::load_job(o.job);
    hwx::AssembleOptions opt;
    opt.horizontality_tol = o.tol;
    const hwx::Assembly out = hwx::assemble(job.jets, job.omega, opt);
    const fs::path dir = prepare_out(o.out);
    write_json(dir / "verification.json", hwx::to_json(out.report));

    const int m = job.m;
    std::vector<std::string> header{"x"};
    for (const char* c : {"F", "G", "H"})
        for (int k = 0; k <= m; ++k) header.push_back(k == 0 ? std::string(c) : "D" + std::to_string(k) + c);
    std::ofstream csv = open_out(dir / "curve.csv");
    hwx::CsvWriter w(csv, header);
    const hwx::Interval hull = out.curve.hull();
    const int n = hull.is_point() ? 1 : std::max(2, o.samples);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1 == n) ? hull.hi : hull.lo + hull.length() * i / (n - 1);
        std::vector<double> vals{x};
        for (hwx::Coord c : {hwx::Coord::F, hwx::Coord::G, hwx::Coord::H})
            for (int k = 0; k <= m; ++k) vals.push_back(out.curve.derivative(c, k, x));
        w.row(vals);
    }
    if (!out.report.pass)
        return fail("verification", "constructed curve failed a postcondition; see verification.json", verification);
    return ok;
}

int run_sweep(const Options& o) {
    const hwx::Job job = hwx::load_job(o.job);
    hwx::PairGrid pairs;
    if (o.random_pairs) {
        const std::vector<double> pts = job.jets.points(16);
        if (pts.size() < 2) throw hwx::DegenerateInput("sweep needs at least two distinct points of K");
        std::mt19937_64 rng(o.seed);
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        while (pairs.size() < o.pairs) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            pairs.emplace_back(pts[i], pts[j]);
        }
    } else {
        pairs = hwx::default_pair_grid(job.jets, 16, o.pairs);
    }
    const fs::path dir = prepare_out(o.out);
    std::ofstream csv = open_out(dir / "sweep.csv");
    hwx::CsvWriter w(csv, {"a", "b", "A", "V_omega", "V_one", "ratio_omega", "ratio_one_scaled"});
    for (const auto& [a, b] : pairs) {
        const hwx::PairFunctionals p = hwx::pair_functionals(job.jets, job.omega, a, b);
        w.row({p.a, p.b, p.A, p.V_omega, p.V_one, p.ratio_omega, p.ratio_one_scaled});
    }
    return ok;
}

int run_counterexample(const Options& o) {
    const hwx::Modulus omega = hwx::parse_modulus_arg(o.omega);
    const hwx::CounterexampleData data = hwx::build_counterexample(o.m, omega, o.nmax);
    const hwx::CounterexampleReport rep = hwx::verify_bounds(data, o.alpha);
    const fs::path dir = prepare_out(o.out);
    write_json(dir / "bounds_report.json", hwx::to_json(rep, data));
    std::ofstream csv = open_out(dir / "counterexample.csv");
    hwx::CsvWriter w(csv, {"n", "gap", "A", "V_omega_alpha", "r_n", "lower_bound"});
    for (const hwx::DivergenceRow& r : rep.rows) w.mixed(r.n, r.gap, r.A, r.V_omega_alpha, r.r, r.lower_bound);
    if (!rep.pass()) return fail("verification", "counterexample bounds not met; see bounds_report.json", verification);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Horizontal C^{m,omega} extensions of jets into the Heisenberg group"};
    app.require_subcommand(1);
    Options o;

    auto* cert = app.add_subcommand("certify", "Whitney constants, horizontality and ratio bounds for a job");
    auto* ext = app.add_subcommand("extend", "Build and verify the horizontal extension; dump the curve");
    auto* sweep = app.add_subcommand("sweep", "Pair functionals A, V_omega, V_one over pairs of points");
    auto* cex = app.add_subcommand("counterexample", "Dyadic jets whose discrepancy ratio diverges");

    for (auto* sub : {cert, ext, sweep}) {
        sub->add_option("--job", o.job, "Job file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
    }
    for (auto* sub : {cert, sweep}) sub->add_option("--pairs", o.pairs, "Maximum number of pairs")->check(CLI::PositiveNumber);
    for (auto* sub : {cert, ext}) sub->add_option("--tol", o.tol, "Relative horizontality tolerance")->check(CLI::PositiveNumber);
    ext->add_option("--samples", o.samples, "Points in the curve dump")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", o.seed, "Seed for --random-pairs");
    sweep->add_flag("--random-pairs", o.random_pairs, "Draw pairs at random instead of the fixed grid");

    cex->add_option("--out", o.out, "Output directory");
    cex->add_option("--m", o.m, "Jet order")->check(CLI::Range(1, hwx::max_jet_order));
    cex->add_option("--omega", o.omega, "linear, log_lipschitz, power:<alpha> or a JSON modulus");
    cex->add_option("--nmax", o.nmax, "Number of dyadic components");
    cex->add_option("--alpha", o.alpha, "Exponent in the velocity modulus, in [1/2, 1]");
    cex->add_option("--seed", o.seed, "Accepted for uniformity; the construction is deterministic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), usage);
    }

    try {
        if (*cert) return run_certify(o);
        if (*ext) return run_extend(o);
        if (*sweep) return run_sweep(o);
        return run_counterexample(o);
    } catch (const hwx::SchemaError& e) {
        return fail("schema", e.what(), usage);
    } catch (const hwx::DomainError& e) {
        return fail("domain", e.what(), usage);
    } catch (const hwx::CertificationError& e) {
        return fail("certification", e.what(), refused);
    } catch (const hwx::AssemblyError& e) {
        return fail("assembly", e.what(), construction);
    } catch (const hwx::NumericalFailure& e) {
        return fail("numerical", e.what(), construction);
    } catch (const hwx::InconsistencyError& e) {
        return fail("inconsistency", e.what(), construction);
    } catch (const hwx::DegenerateInput& e) {
        return fail("degenerate", e.what(), construction);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), internal);
    }
}
