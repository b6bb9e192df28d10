#pragma once

// Command layer behind the sturmcert executable. Each command returns its exit code:
// 0 certified / converged / pass, 1 not certified / unconverged / fail, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sturmcert/certifier.hpp"
#include "sturmcert/config.hpp"
#include "sturmcert/envelope2d.hpp"
#include "sturmcert/io.hpp"
#include "sturmcert/operator.hpp"

namespace sturmcert::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

struct CommonOptions {
    std::filesystem::path config;
    std::filesystem::path out = ".";
    std::optional<std::size_t> grid;
    std::uint64_t seed = 1;
    bool plot = false;
};

struct CertifyArgs {
    std::vector<double> rho_scan;
    std::size_t probe_trials = 100;
};

struct SolveArgs {
    std::optional<std::filesystem::path> certificate;
};

struct EnvelopeArgs {
    double r = 1.0;
    double R = 2.0;
    std::size_t density = 200;
    std::size_t samples = 256;
};

namespace detail {

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline nlohmann::ordered_json probe_json(const ConeProbeReport& r) {
    return {{"trials", r.trials},
            {"failures", r.failures},
            {"input_failures", r.input_failures},
            {"worst_margin", r.worst_margin},
            {"seed", r.seed}};
}

inline void print_certificate(const Certificate& c, std::ostream& out) {
    out << "m = " << io::num(c.m) << ", M(a,b) = " << io::num(c.M_ab) << ", c = " << io::num(c.cone.c)
        << ", branch (" << c.branch << ")\n";
    for (const auto& k : c.conditions)
        out << "  " << (k.passed ? "pass" : "FAIL") << "  " << k.name << "  " << k.detail
            << "  margin " << io::num(k.margin) << "\n";
    out << (c.certified() ? "certified" : "not certified") << ": annulus (" << io::num(c.annulus.first) << ", "
        << io::num(c.annulus.second) << ")\n";
}

/// All pairs rho_i < rho_j from the scan list, in list order.
inline std::vector<std::pair<double, double>> scan_pairs(std::vector<double> rhos) {
    std::sort(rhos.begin(), rhos.end());
    rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < rhos.size(); ++i)
        for (std::size_t j = i + 1; j < rhos.size(); ++j) out.emplace_back(rhos[i], rhos[j]);
    return out;
}

}  // namespace detail

/// Certificate JSON for a config, the cone-mapping probe included; identical inputs give identical bytes.
inline nlohmann::ordered_json certificate_document(const Problem& p, const Certificate& cert, std::uint64_t seed,
                                                   std::size_t probe_trials) {
    auto j = to_json(cert);
    j["cone_mapping_probe"] = detail::probe_json(cone_mapping_probe(p, probe_trials, seed));
    return j;
}

inline int cmd_certify(const CommonOptions& common, const CertifyArgs& args, std::ostream& out) {
    auto cfg = load_config(common.config);
    auto p = build_problem(cfg, common.grid);
    std::filesystem::create_directories(common.out);

    if (args.rho_scan.empty()) {
        auto cert = certify(p, certify_options(cfg));
        detail::print_certificate(cert, out);
        io::write_text(common.out / "certificate.json",
                       detail::json_text(certificate_document(p, cert, common.seed, args.probe_trials)));
        return cert.certified() ? exit_ok : exit_fail;
    }

    // Scan: every pair from the list; the first certified pair becomes certificate.json.
    if (!cfg.certify.eps) throw ConfigError("--rho-scan still needs [certify] eps");
    CertifyOptions base;
    base.eps = *cfg.certify.eps;
    base.margin = cfg.certify.margin;
    base.bound_density = cfg.certify.density;
    base.curve_tol = cfg.certify.curve_tol;
    nlohmann::ordered_json scan = nlohmann::ordered_json::array();
    std::optional<Certificate> chosen;
    for (auto [r1, r2] : detail::scan_pairs(args.rho_scan)) {
        auto o = base;
        o.rho1 = r1;
        o.rho2 = r2;
        o.branch.reset();
        auto cert = certify(p, o);
        scan.push_back({{"rho1", r1}, {"rho2", r2}, {"branch", std::string(1, cert.branch)},
                        {"verdict", cert.certified() ? "certified" : "not_certified"}});
        out << "rho1 = " << io::num(r1) << ", rho2 = " << io::num(r2) << ": "
            << (cert.certified() ? "certified" : "not certified") << " (branch " << cert.branch << ")\n";
        if (cert.certified() && !chosen) chosen = cert;
    }
    io::write_text(common.out / "rho_scan.json", detail::json_text(scan));
    if (!chosen) return exit_fail;
    detail::print_certificate(*chosen, out);
    io::write_text(common.out / "certificate.json",
                   detail::json_text(certificate_document(p, *chosen, common.seed, args.probe_trials)));
    return exit_ok;
}

inline int cmd_solve(const CommonOptions& common, const SolveArgs& args, std::ostream& out) {
    auto cfg = load_config(common.config);
    auto p = build_problem(cfg, common.grid);
    std::filesystem::create_directories(common.out);
    auto o = solve_options(cfg);

    std::optional<std::pair<double, double>> annulus;
    if (args.certificate) {
        std::ifstream in(*args.certificate);
        if (!in) throw ConfigError("cannot open certificate '" + args.certificate->string() + "'");
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("annulus") || !j.contains("cone"))
            throw ConfigError("certificate '" + args.certificate->string() + "' is malformed");
        if (j.value("verdict", "") != "certified") out << "warning: certificate verdict is not certified\n";
        annulus = std::pair{j["annulus"][0].get<double>(), j["annulus"][1].get<double>()};
        o.annulus = annulus;
        o.q_radius = annulus->second / j["cone"]["c"].get<double>();
        o.divergence_radius = 10.0 * *o.q_radius;
    } else if (cfg.certify.rho1 && cfg.certify.rho2 && cfg.certify.eps) {
        auto cert = certify(p, certify_options(cfg));
        if (cert.certified()) {
            o = with_certificate(o, cert);
            annulus = cert.annulus;
            out << "using certified annulus (" << io::num(cert.annulus.first) << ", "
                << io::num(cert.annulus.second) << ")\n";
        }
    }

    auto sol = solve_fixed_point(p, initial_guess(cfg, p.grid()), o);
    out << "method " << to_string(sol.method) << ", iterations " << sol.iterations << ", residual "
        << io::num(sol.residual_sup) << ", |u| = " << io::num(sol.norm) << ", in cone " << sol.in_cone
        << ", Q-check " << (sol.q_bound_ok ? "pass" : "FAIL");
    if (sol.annulus_ok) out << ", in annulus " << *sol.annulus_ok;
    out << "\n";
    if (!sol.note.empty()) out << "note: " << sol.note << "\n";

    io::write_text(common.out / "solution.csv", io::solution_csv(sol));
    if (common.plot) io::write_text(common.out / "solution.svg", io::solution_svg(sol, annulus));
    bool ok = sol.converged && sol.annulus_ok.value_or(true) && sol.q_bound_ok;
    return ok ? exit_ok : exit_fail;
}

inline int cmd_curves(const CommonOptions& common, std::ostream& out) {
    auto cfg = load_config(common.config);
    auto p = build_problem(cfg, common.grid);
    std::filesystem::create_directories(common.out);
    const auto& c = cfg.certify;

    std::ostringstream rep;
    bool all = true;
    if (p.nonlinearity().curves.empty()) rep << "no discontinuity curves declared\n";
    for (const auto& cv : p.nonlinearity().curves) {
        auto r = classify_curve(cv, p.nonlinearity(), p.weight(), p.grid(), c.curve_tol, c.margin);
        all = all && r.admissible;
        rep << r.label << ": declared " << to_string(r.declared) << ", classified " << to_string(r.classified)
            << ", " << (r.admissible ? "admissible" : "NOT admissible") << "\n";
        if (r.viability)
            rep << "  viability: worst residual " << io::num(r.viability->worst_residual) << " at t = "
                << io::num(r.viability->worst_t) << " over " << r.viability->samples << " samples"
                << (r.viability->finite_difference ? " (finite-difference gamma'')" : "") << "\n";
        if (r.inviability)
            rep << "  inviability: inequality " << r.inviability->inequality << ", margins "
                << io::num(r.inviability->worst_margin1) << " / " << io::num(r.inviability->worst_margin2)
                << " over " << r.inviability->samples << " samples"
                << (r.inviability->finite_difference ? " (finite-difference gamma'')" : "") << "\n";
    }
    out << rep.str();
    io::write_text(common.out / "curves.txt", rep.str());
    return all ? exit_ok : exit_fail;
}

inline int cmd_envelope_demo(const CommonOptions& common, const EnvelopeArgs& args, std::ostream& out) {
    if (!(args.r > 0.0 && args.r < args.R)) throw DomainError("envelope-demo needs 0 < r < R");
    std::filesystem::create_directories(common.out);
    auto T = plane::polar_example_operator(args.r);
    plane::EnvelopeOptions eo;
    eo.samples_per_eps = args.samples;

    struct Probe {
        std::string name;
        plane::Point x;
    };
    const double pi = std::numbers::pi;
    std::vector<Probe> probes{{"diagonal", plane::from_polar(args.r, pi / 4)},
                              {"below_diagonal", plane::from_polar(args.r, pi / 8)},
                              {"above_diagonal", plane::from_polar(args.r, 3 * pi / 8)},
                              {"off_circle", plane::from_polar(0.5 * (args.r + args.R), pi / 4)}};
    bool ok = true;
    nlohmann::ordered_json report;
    for (const auto& pr : probes) {
        auto env = plane::cc_envelope(T, pr.x, eo);
        bool cond = plane::envelope_condition_check(T, pr.x, env);
        ok = ok && cond;
        io::write_text(common.out / ("envelope_" + pr.name + ".csv"), io::polygon_csv(env.intersection));
        if (common.plot) io::write_text(common.out / ("envelope_" + pr.name + ".svg"), io::envelope_svg(env, T(pr.x)));
        out << pr.name << ": x = (" << io::num(pr.x.x) << ", " << io::num(pr.x.y) << "), " << env.intersection.size()
            << " hull vertices, diameter " << io::num(plane::diameter(env.intersection)) << ", condition "
            << (cond ? "holds" : "FAILS") << "\n";
        nlohmann::ordered_json verts = nlohmann::ordered_json::array();
        for (const auto& v : env.intersection) verts.push_back({v.x, v.y});
        report["envelopes"].push_back({{"name", pr.name},
                                       {"x", {pr.x.x, pr.x.y}},
                                       {"vertices", verts},
                                       {"eps_steps", env.eps_ladder.size()},
                                       {"converged", env.converged},
                                       {"condition_holds", cond}});
    }
    auto scan = plane::annulus_fixed_point_scan(T, args.r, args.R, args.density);
    bool no_fixed_point = scan.min_residual > scan.spacing;
    ok = ok && no_fixed_point;
    report["scan"] = {{"r", args.r},
                      {"R", args.R},
                      {"density", args.density},
                      {"points", scan.points},
                      {"spacing", scan.spacing},
                      {"min_residual", scan.min_residual},
                      {"at", {scan.at.x, scan.at.y}},
                      {"no_fixed_point", no_fixed_point}};
    out << "annulus scan: min |x - Tx| = " << io::num(scan.min_residual) << " at (" << io::num(scan.at.x) << ", "
        << io::num(scan.at.y) << "), lattice spacing " << io::num(scan.spacing) << "\n";
    io::write_text(common.out / "envelope_report.json", detail::json_text(report));
    return ok ? exit_ok : exit_fail;
}

/// Parses argv and dispatches; messages go to `out` and `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Existence certificates and solvers for discontinuous Sturm-Liouville problems", "sturmcert"};
    app.require_subcommand(1);
    CommonOptions common;
    CertifyArgs cert_args;
    SolveArgs solve_args;
    EnvelopeArgs env_args;
    std::string certificate_path;
    std::size_t grid = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", common.config, "problem file");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--grid", grid, "override the number of uniform grid nodes")->check(CLI::Range(2, 1 << 20));
        sub->add_option("--seed", common.seed, "seed for randomized probes")->capture_default_str();
        sub->add_flag("--plot", common.plot, "also write SVG plots");
    };
    auto* certify_cmd = app.add_subcommand("certify", "check the compression-expansion conditions");
    add_common(certify_cmd, true);
    certify_cmd->add_option("--rho-scan", cert_args.rho_scan, "candidate radii; every pair is tried")->delimiter(',');
    certify_cmd->add_option("--probe-trials", cert_args.probe_trials, "random cone members pushed through T")
        ->capture_default_str();
    auto* solve_cmd = app.add_subcommand("solve", "compute a fixed point of T");
    add_common(solve_cmd, true);
    solve_cmd->add_option("--certificate", certificate_path, "certificate.json restricting the annulus")
        ->check(CLI::ExistingFile);
    auto* curves_cmd = app.add_subcommand("curves", "classify the declared discontinuity curves");
    add_common(curves_cmd, true);
    auto* env_cmd = app.add_subcommand("envelope-demo", "envelopes of the polar example operator in the plane");
    add_common(env_cmd, false);
    env_cmd->add_option("--r", env_args.r, "radius of the discontinuity circle")->capture_default_str();
    env_cmd->add_option("--R", env_args.R, "outer radius of the scanned annulus")->capture_default_str();
    env_cmd->add_option("--density", env_args.density, "polar scan lattice size per axis")->capture_default_str();
    env_cmd->add_option("--samples", env_args.samples, "ball samples per eps")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    if (grid) common.grid = grid;
    if (!certificate_path.empty()) solve_args.certificate = certificate_path;

    try {
        if (*certify_cmd) return cmd_certify(common, cert_args, out);
        if (*solve_cmd) return cmd_solve(common, solve_args, out);
        if (*curves_cmd) return cmd_curves(common, out);
        return cmd_envelope_demo(common, env_args, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace sturmcert::cli
