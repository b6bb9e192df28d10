#pragma once

// Line-oriented problem files:
//
//   # comment
//   [boundary]            alpha, beta, gamma, delta         (or [kernel] k(t,s), phi(s), c)
//   [cone]                a, b
//   [weight]              g = <expr in t>  |  table = <path with "s g" rows>
//   [grid]                n
//   [piece]   (repeated)  label, region = <predicate in t,u>, f = <expr in t,u>
//   [curve]   (repeated)  label, gamma, gamma2, domain = t0, t1, kind, eps, psi
//   [growth]              bound = <expr in r>
//   [certify]             rho1, rho2, eps, branch = a|b|auto, margin, density, curve_tol
//   [solve]               theta, tol, max_iter, init = <expr in t>, method = picard|newton|auto
//
// Numeric values accept constant expressions such as 1/4 or pi/8.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sturmcert/certifier.hpp"
#include "sturmcert/cone.hpp"
#include "sturmcert/error.hpp"
#include "sturmcert/expression.hpp"
#include "sturmcert/kernels.hpp"
#include "sturmcert/nonlinearity.hpp"
#include "sturmcert/operator.hpp"
#include "sturmcert/problem.hpp"
#include "sturmcert/quadrature.hpp"

namespace sturmcert {

struct KernelConfig {
    Expression k;    ///< k(t,s)
    Expression phi;  ///< Phi(s)
    double c = 0.0;
    bool operator==(const KernelConfig&) const = default;
};

struct PieceConfig {
    std::string label;
    Predicate region;
    Expression f;
    bool operator==(const PieceConfig&) const = default;
};

struct CurveConfig {
    std::string label;
    Expression gamma;
    std::optional<Expression> gamma2;
    double t0 = 0.0;
    double t1 = 1.0;
    CurveKind kind = CurveKind::unknown;
    std::optional<double> eps;
    std::optional<Expression> psi;
    bool operator==(const CurveConfig&) const = default;
};

struct CertifyConfig {
    std::optional<double> rho1;
    std::optional<double> rho2;
    std::optional<double> eps;
    std::optional<char> branch;
    double margin = default_strict_margin;
    std::size_t density = default_bound_density;
    double curve_tol = 1e-8;
    bool operator==(const CertifyConfig&) const = default;
};

struct SolveConfig {
    double theta = 0.5;
    double tol = 1e-10;
    std::size_t max_iter = 2000;
    std::optional<Expression> init;  ///< constant 1 when absent
    SolveMethod method = SolveMethod::automatic;
    bool operator==(const SolveConfig&) const = default;
};

struct ProblemConfig {
    std::optional<BoundaryParams> boundary;
    std::optional<KernelConfig> kernel;
    double a = 0.0;
    double b = 1.0;
    std::optional<Expression> weight;
    std::optional<std::string> weight_table;
    std::vector<double> table_s;
    std::vector<double> table_g;
    std::size_t grid_n = 401;
    std::vector<PieceConfig> pieces;
    std::vector<CurveConfig> curves;
    std::optional<Expression> growth;
    CertifyConfig certify;
    SolveConfig solve;
    bool operator==(const ProblemConfig&) const = default;
};

namespace detail {

struct RawEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct RawSection {
    std::string name;
    int line = 0;
    std::vector<RawEntry> entries;
};

inline std::vector<RawSection> lex_config(std::string_view text) {
    std::vector<RawSection> sections;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header", line);
            std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
            if (name.empty()) throw ConfigError("empty section name", line);
            sections.push_back({name, line, {}});
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        if (sections.empty()) throw ConfigError("entry outside of any section", line);
        std::string key = trim(std::string_view(s).substr(0, eq));
        std::string value = trim(std::string_view(s).substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
        for (const auto& e : sections.back().entries)
            if (e.key == key) throw ConfigError("duplicate key '" + key + "'", line);
        sections.back().entries.push_back({key, value, line});
    }
    return sections;
}

/// Key lookup over one section; every key must be consumed.
class SectionReader {
public:
    explicit SectionReader(const RawSection& s) : s_(s) {}

    const RawEntry* find(const std::string& key) {
        for (const auto& e : s_.entries)
            if (e.key == key) {
                used_.insert(key);
                return &e;
            }
        return nullptr;
    }

    const RawEntry& require(const std::string& key) {
        if (const auto* e = find(key)) return *e;
        throw ConfigError("[" + s_.name + "] missing required key '" + key + "'", s_.line);
    }

    std::optional<double> number(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        return to_number(*e);
    }

    double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

    double required_number(const std::string& key) { return to_number(require(key)); }

    std::optional<std::size_t> count(const std::string& key, std::size_t min_value) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        double v = to_number(*e);
        if (v != std::floor(v) || v < static_cast<double>(min_value))
            throw ConfigError("'" + key + "' must be an integer >= " + std::to_string(min_value), e->line);
        return static_cast<std::size_t>(v);
    }

    std::optional<Expression> expression(const std::string& key, const std::vector<std::string>& vars) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        return parse_expr(*e, vars);
    }

    Expression required_expression(const std::string& key, const std::vector<std::string>& vars) {
        return parse_expr(require(key), vars);
    }

    void finish() const {
        for (const auto& e : s_.entries)
            if (!used_.count(e.key)) throw ConfigError("[" + s_.name + "] unknown key '" + e.key + "'", e.line);
    }

    int line() const { return s_.line; }

    static double to_number(const RawEntry& e) {
        double v = parse_expr(e, {})({});
        if (!std::isfinite(v)) throw ConfigError("'" + e.key + "' is not a finite number", e.line);
        return v;
    }

    static Expression parse_expr(const RawEntry& e, const std::vector<std::string>& vars) {
        try {
            return Expression::parse(e.value, vars);
        } catch (const ConfigError& err) {
            throw ConfigError(std::string(err.what()), e.line);
        }
    }

private:
    const RawSection& s_;
    std::set<std::string> used_;
};

inline void load_table(ProblemConfig& cfg, const std::filesystem::path& path, int line) {
    std::ifstream in(path);
    if (!in) throw ConfigError("weight table '" + path.string() + "' cannot be opened", line);
    std::string raw;
    int row = 0;
    while (std::getline(in, raw)) {
        ++row;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        for (char& ch : raw)
            if (ch == ',' || ch == ';') ch = ' ';
        std::istringstream fields(raw);
        double s = 0.0, g = 0.0;
        if (!(fields >> s)) continue;
        if (!(fields >> g))
            throw ConfigError("weight table '" + path.string() + "' row " + std::to_string(row) + " needs two columns", line);
        cfg.table_s.push_back(s);
        cfg.table_g.push_back(g);
    }
    try {
        (void)Weight::tabulated(cfg.table_s, cfg.table_g);
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), line);
    }
}

inline CurveKind parse_kind(const RawEntry& e) {
    if (e.value == "viable") return CurveKind::viable;
    if (e.value == "inviable") return CurveKind::inviable;
    if (e.value == "unknown") return CurveKind::unknown;
    throw ConfigError("curve kind must be viable, inviable or unknown", e.line);
}

inline SolveMethod parse_method(const RawEntry& e) {
    if (e.value == "picard") return SolveMethod::picard;
    if (e.value == "newton") return SolveMethod::newton;
    if (e.value == "auto") return SolveMethod::automatic;
    throw ConfigError("solve method must be picard, newton or auto", e.line);
}

}  // namespace detail

/// Parses and validates a problem file. Relative table paths resolve against `base_dir`.
inline ProblemConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
    using detail::SectionReader;
    const std::vector<std::string> tu{"t", "u"}, t{"t"};
    ProblemConfig cfg;
    std::set<std::string> seen;
    int cone_line = 0, cone_b_line = 0;
    std::optional<double> cone_c;

    for (const auto& sec : detail::lex_config(text)) {
        const bool repeatable = sec.name == "piece" || sec.name == "curve";
        if (!repeatable && !seen.insert(sec.name).second)
            throw ConfigError("section [" + sec.name + "] appears more than once", sec.line);
        SectionReader r(sec);

        if (sec.name == "boundary") {
            BoundaryParams bc{r.required_number("alpha"), r.required_number("beta"), r.required_number("gamma"),
                              r.required_number("delta")};
            try {
                bc.validate();
            } catch (const ParameterError& e) {
                throw ConfigError(e.what(), sec.line);
            }
            cfg.boundary = bc;
        } else if (sec.name == "kernel") {
            cfg.kernel = KernelConfig{r.required_expression("k", {"t", "s"}), r.required_expression("phi", {"s"}),
                                      r.required_number("c")};
            if (!(cfg.kernel->c > 0.0 && cfg.kernel->c <= 1.0))
                throw ConfigError("[kernel] c must lie in (0,1]", r.require("c").line);
        } else if (sec.name == "cone") {
            cfg.a = r.required_number("a");
            cfg.b = r.required_number("b");
            cone_line = sec.line;
            cone_b_line = r.require("b").line;
            cone_c = r.number("c");
            if (cone_c) throw ConfigError("c belongs in [kernel]; it is derived for [boundary] problems", r.require("c").line);
        } else if (sec.name == "weight") {
            cfg.weight = r.expression("g", t);
            if (const auto* e = r.find("table")) {
                if (cfg.weight) throw ConfigError("[weight] takes either g or table, not both", e->line);
                cfg.weight_table = e->value;
                std::filesystem::path path(e->value);
                detail::load_table(cfg, path.is_absolute() ? path : base_dir / path, e->line);
            }
        } else if (sec.name == "grid") {
            cfg.grid_n = r.count("n", 2).value_or(cfg.grid_n);
        } else if (sec.name == "piece") {
            PieceConfig pc;
            const auto* label = r.find("label");
            pc.label = label ? label->value : "piece" + std::to_string(cfg.pieces.size() + 1);
            const auto& region = r.require("region");
            try {
                pc.region = Predicate::parse(region.value, tu);
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), region.line);
            }
            pc.f = r.required_expression("f", tu);
            cfg.pieces.push_back(std::move(pc));
        } else if (sec.name == "curve") {
            CurveConfig cc;
            const auto* label = r.find("label");
            cc.label = label ? label->value : "curve" + std::to_string(cfg.curves.size() + 1);
            cc.gamma = r.required_expression("gamma", t);
            cc.gamma2 = r.expression("gamma2", t);
            if (const auto* d = r.find("domain")) {
                auto comma = d->value.find(',');
                if (comma == std::string::npos) throw ConfigError("domain must be 't0, t1'", d->line);
                cc.t0 = SectionReader::to_number({d->key, detail::trim(d->value.substr(0, comma)), d->line});
                cc.t1 = SectionReader::to_number({d->key, detail::trim(d->value.substr(comma + 1)), d->line});
                if (!(0.0 <= cc.t0 && cc.t0 < cc.t1 && cc.t1 <= 1.0))
                    throw ConfigError("domain must satisfy 0 <= t0 < t1 <= 1", d->line);
            }
            if (const auto* k = r.find("kind")) cc.kind = detail::parse_kind(*k);
            cc.eps = r.number("eps");
            cc.psi = r.expression("psi", t);
            if (cc.kind == CurveKind::inviable && (!cc.eps || !cc.psi))
                throw ConfigError("inviable curve '" + cc.label + "' needs eps and psi", sec.line);
            if (cc.eps && !(*cc.eps > 0.0)) throw ConfigError("curve eps must be positive", r.require("eps").line);
            cfg.curves.push_back(std::move(cc));
        } else if (sec.name == "growth") {
            cfg.growth = r.required_expression("bound", {"r"});
        } else if (sec.name == "certify") {
            auto& c = cfg.certify;
            c.rho1 = r.number("rho1");
            c.rho2 = r.number("rho2");
            c.eps = r.number("eps");
            if (const auto* br = r.find("branch")) {
                if (br->value == "a" || br->value == "b") c.branch = br->value[0];
                else if (br->value != "auto") throw ConfigError("branch must be a, b or auto", br->line);
            }
            c.margin = r.number_or("margin", c.margin);
            c.density = r.count("density", 1).value_or(c.density);
            c.curve_tol = r.number_or("curve_tol", c.curve_tol);
        } else if (sec.name == "solve") {
            auto& s = cfg.solve;
            s.theta = r.number_or("theta", s.theta);
            if (!(s.theta > 0.0 && s.theta <= 1.0)) throw ConfigError("theta must lie in (0,1]", r.require("theta").line);
            s.tol = r.number_or("tol", s.tol);
            s.max_iter = r.count("max_iter", 1).value_or(s.max_iter);
            s.init = r.expression("init", t);
            if (const auto* m = r.find("method")) s.method = detail::parse_method(*m);
        } else {
            throw ConfigError("unknown section [" + sec.name + "]", sec.line);
        }
        r.finish();
    }

    if (cfg.boundary && cfg.kernel) throw ConfigError("use either [boundary] or [kernel], not both");
    if (!cfg.boundary && !cfg.kernel) throw ConfigError("missing [boundary] or [kernel] section");
    if (!seen.count("cone")) throw ConfigError("missing [cone] section");
    if (cfg.pieces.empty()) throw ConfigError("at least one [piece] section is required");
    if (cfg.boundary) {
        try {
            (void)cone_params(*cfg.boundary, cfg.a, cfg.b);
        } catch (const AdmissibilityError& e) {
            throw ConfigError(e.what(), cone_b_line);
        }
    } else if (!(0.0 <= cfg.a && cfg.a < cfg.b && cfg.b <= 1.0)) {
        throw ConfigError("cone interval needs 0 <= a < b <= 1", cone_line);
    }
    return cfg;
}

inline ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

/// Writes a config that parses back to an equal ProblemConfig.
inline std::string serialize_config(const ProblemConfig& cfg) {
    using detail::format_number;
    std::ostringstream os;
    if (cfg.boundary) {
        const auto& bc = *cfg.boundary;
        os << "[boundary]\nalpha = " << format_number(bc.alpha) << "\nbeta = " << format_number(bc.beta)
           << "\ngamma = " << format_number(bc.gamma) << "\ndelta = " << format_number(bc.delta) << "\n\n";
    }
    if (cfg.kernel)
        os << "[kernel]\nk = " << cfg.kernel->k.source() << "\nphi = " << cfg.kernel->phi.source()
           << "\nc = " << format_number(cfg.kernel->c) << "\n\n";
    os << "[cone]\na = " << format_number(cfg.a) << "\nb = " << format_number(cfg.b) << "\n\n";
    if (cfg.weight) os << "[weight]\ng = " << cfg.weight->source() << "\n\n";
    if (cfg.weight_table) os << "[weight]\ntable = " << *cfg.weight_table << "\n\n";
    os << "[grid]\nn = " << cfg.grid_n << "\n\n";
    for (const auto& p : cfg.pieces)
        os << "[piece]\nlabel = " << p.label << "\nregion = " << (p.region.source().empty() ? "true" : p.region.source())
           << "\nf = " << p.f.source() << "\n\n";
    for (const auto& c : cfg.curves) {
        os << "[curve]\nlabel = " << c.label << "\ngamma = " << c.gamma.source() << "\n";
        if (c.gamma2) os << "gamma2 = " << c.gamma2->source() << "\n";
        os << "domain = " << format_number(c.t0) << ", " << format_number(c.t1) << "\nkind = " << to_string(c.kind)
           << "\n";
        if (c.eps) os << "eps = " << format_number(*c.eps) << "\n";
        if (c.psi) os << "psi = " << c.psi->source() << "\n";
        os << "\n";
    }
    if (cfg.growth) os << "[growth]\nbound = " << cfg.growth->source() << "\n\n";
    const auto& c = cfg.certify;
    os << "[certify]\n";
    if (c.rho1) os << "rho1 = " << format_number(*c.rho1) << "\n";
    if (c.rho2) os << "rho2 = " << format_number(*c.rho2) << "\n";
    if (c.eps) os << "eps = " << format_number(*c.eps) << "\n";
    os << "branch = " << (c.branch ? std::string(1, *c.branch) : std::string("auto")) << "\nmargin = "
       << format_number(c.margin) << "\ndensity = " << c.density << "\ncurve_tol = " << format_number(c.curve_tol)
       << "\n\n";
    const auto& s = cfg.solve;
    os << "[solve]\ntheta = " << format_number(s.theta) << "\ntol = " << format_number(s.tol)
       << "\nmax_iter = " << s.max_iter << "\n";
    if (s.init) os << "init = " << s.init->source() << "\n";
    os << "method = " << to_string(s.method) << "\n";
    return os.str();
}

inline Weight build_weight(const ProblemConfig& cfg) {
    if (cfg.weight_table) return Weight::tabulated(cfg.table_s, cfg.table_g);
    if (cfg.weight) return Weight([e = *cfg.weight](double s) { return e({s}); });
    return Weight::constant(1.0);
}

inline Kernel build_kernel(const ProblemConfig& cfg) {
    if (cfg.boundary) return make_green_kernel(*cfg.boundary, cfg.a, cfg.b);
    Kernel k;
    k.eval = [e = cfg.kernel->k](double t, double s) { return e({t, s}); };
    k.phi = [e = cfg.kernel->phi](double s) { return e({s}); };
    k.cone = ConeSpec{cfg.a, cfg.b, cfg.kernel->c};
    return k;
}

inline Nonlinearity build_nonlinearity(const ProblemConfig& cfg) {
    Nonlinearity nl;
    for (const auto& p : cfg.pieces)
        nl.pieces.push_back({[r = p.region](double t, double u) { return r({t, u}); },
                             [f = p.f](double t, double u) { return f({t, u}); }, p.label});
    for (const auto& c : cfg.curves) {
        Curve cv;
        cv.domain = {c.t0, c.t1};
        cv.gamma = [e = c.gamma](double t) { return e({t}); };
        if (c.gamma2) cv.gamma2 = [e = *c.gamma2](double t) { return e({t}); };
        cv.declared_kind = c.kind;
        if (c.eps && c.psi) cv.inviable = InviableData{*c.eps, [e = *c.psi](double t) { return e({t}); }};
        cv.label = c.label;
        nl.curves.push_back(std::move(cv));
    }
    if (cfg.growth) nl.growth_bound = [e = *cfg.growth](double r) { return e({r}); };
    return nl;
}

/// Builds the problem; `grid_n` overrides the configured node count.
inline Problem build_problem(const ProblemConfig& cfg, std::optional<std::size_t> grid_n = std::nullopt) {
    return Problem(build_kernel(cfg), build_weight(cfg), build_nonlinearity(cfg),
                   Grid::uniform(grid_n.value_or(cfg.grid_n)));
}

inline CertifyOptions certify_options(const ProblemConfig& cfg) {
    const auto& c = cfg.certify;
    if (!c.rho1 || !c.rho2 || !c.eps) throw ConfigError("[certify] needs rho1, rho2 and eps");
    CertifyOptions o;
    o.rho1 = *c.rho1;
    o.rho2 = *c.rho2;
    o.eps = *c.eps;
    o.branch = c.branch;
    o.margin = c.margin;
    o.bound_density = c.density;
    o.curve_tol = c.curve_tol;
    return o;
}

inline SolveOptions solve_options(const ProblemConfig& cfg) {
    SolveOptions o;
    o.theta = cfg.solve.theta;
    o.tol = cfg.solve.tol;
    o.max_iter = cfg.solve.max_iter;
    o.method = cfg.solve.method;
    return o;
}

inline GridFunction initial_guess(const ProblemConfig& cfg, const Grid& grid) {
    if (!cfg.solve.init) return GridFunction(grid, std::vector<double>(grid.size(), 1.0));
    return GridFunction::sample(grid, [e = *cfg.solve.init](double t) { return e({t}); });
}

}  // namespace sturmcert
