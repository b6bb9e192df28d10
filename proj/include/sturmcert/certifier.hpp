#pragma once

// Compression-expansion existence certificates for u = T u on the cone.
//
//   1/m      = sup_{t in [0,1]} int_0^1 k(t,s) g(s) ds
//   1/M(a,b) = inf_{t in [a,b]} int_a^b k(t,s) g(s) ds
//   (I1_rho): f^{rho,eps} < m        (I0_rho): f_{rho,eps} > M(a,b)
//
// Branch (a): rho1/c < rho2 with (I0_rho1) and (I1_rho2).
// Branch (b): rho1 < rho2   with (I1_rho1) and (I0_rho2).
// Every declared discontinuity curve must also be admissible (viable or inviable).

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sturmcert/error.hpp"
#include "sturmcert/kernels.hpp"
#include "sturmcert/nonlinearity.hpp"
#include "sturmcert/problem.hpp"
#include "sturmcert/quadrature.hpp"

namespace sturmcert {

inline double compute_m(const Kernel& kernel, const Weight& g, const Grid& grid) {
    auto sup = sup_param_integral(kernel.eval, g, {0.0, 1.0}, {0.0, 1.0}, grid);
    if (!(sup.value > 0.0)) throw DegenerateError("sup_t int k(t,s) g(s) ds is zero; m is undefined");
    return 1.0 / sup.value;
}

inline double compute_M(const Kernel& kernel, const Weight& g, const ConeSpec& spec, const Grid& grid) {
    auto inf = inf_param_integral(kernel.eval, g, spec.interval(), spec.interval(), grid);
    if (!(inf.value > 0.0)) throw DegenerateError("inf_{t in [a,b]} int_a^b k(t,s) g(s) ds is zero; M(a,b) is undefined");
    return 1.0 / inf.value;
}

struct Condition {
    std::string name;
    bool passed = false;
    double margin = 0.0;  ///< relative slack of the strict inequality (or raw margin for curves/H4)
    std::string detail;
};

enum class Verdict { certified, not_certified };

struct Certificate {
    double m = 0.0;
    double M_ab = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double eps = 0.0;
    ConeSpec cone;
    char branch = 'b';
    BoundsReport f_upper_at_rho;
    BoundsReport f_lower_at_rho;
    std::vector<Condition> conditions;
    std::pair<double, double> annulus{0.0, 0.0};
    std::vector<CurveReport> curve_reports;
    Verdict verdict = Verdict::not_certified;
    double margin = default_strict_margin;
    std::size_t grid_nodes = 0;
    std::size_t bound_density = default_bound_density;
    double curve_tol = 1e-8;

    bool certified() const noexcept { return verdict == Verdict::certified; }
};

struct CertifyOptions {
    double rho1 = 1.0;
    double rho2 = 2.0;
    double eps = 0.1;
    double margin = default_strict_margin;
    std::optional<char> branch;  ///< 'a' or 'b'; both orderings are tried when absent
    std::size_t bound_density = default_bound_density;
    double curve_tol = 1e-8;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// f^{rho,eps} < m with relative slack >= margin.
inline Condition upper_condition(const BoundsReport& b, double m, double margin) {
    Condition c;
    c.name = "I1(rho=" + fmt(b.rho) + ")";
    c.margin = (m - b.value) / m;
    c.passed = c.margin >= margin;
    c.detail = "f^{rho,eps}=" + fmt(b.value) + " < m=" + fmt(m);
    return c;
}

/// f_{rho,eps} > M(a,b) with relative slack >= margin.
inline Condition lower_condition(const BoundsReport& b, double M, double margin) {
    Condition c;
    c.name = "I0(rho=" + fmt(b.rho) + ")";
    c.margin = (b.value - M) / M;
    c.passed = c.margin >= margin;
    c.detail = "f_{rho,eps}=" + fmt(b.value) + " > M(a,b)=" + fmt(M);
    return c;
}

inline Certificate certify_branch(const Problem& p, const CertifyOptions& o, char branch, double m, double M,
                                  const std::vector<CurveReport>& curves) {
    Certificate cert;
    cert.m = m;
    cert.M_ab = M;
    cert.rho1 = o.rho1;
    cert.rho2 = o.rho2;
    cert.eps = o.eps;
    cert.cone = p.cone();
    cert.branch = branch;
    cert.margin = o.margin;
    cert.grid_nodes = p.grid().size();
    cert.bound_density = o.bound_density;
    cert.curve_tol = o.curve_tol;
    cert.annulus = {std::min(o.rho1, o.rho2), std::max(o.rho1, o.rho2)};
    cert.curve_reports = curves;

    const auto& h4 = p.h4();
    cert.conditions.push_back({"H4", h4.passed, std::min(h4.worst_upper_margin, h4.worst_lower_margin),
                               h4.describe()});

    const double rho_lower = branch == 'a' ? o.rho1 : o.rho2;
    const double rho_upper = branch == 'a' ? o.rho2 : o.rho1;
    cert.f_upper_at_rho = f_upper(p.nonlinearity(), rho_upper, o.eps, o.bound_density);
    cert.f_lower_at_rho = f_lower(p.nonlinearity(), rho_lower, o.eps, p.cone(), o.bound_density);
    auto up = upper_condition(cert.f_upper_at_rho, m, o.margin);
    auto lo = lower_condition(cert.f_lower_at_rho, M, o.margin);
    if (branch == 'a') {
        cert.conditions.push_back(lo);
        cert.conditions.push_back(up);
    } else {
        cert.conditions.push_back(up);
        cert.conditions.push_back(lo);
    }

    for (const auto& cr : curves) {
        Condition c;
        c.name = "curve(" + cr.label + ")";
        c.passed = cr.admissible;
        c.detail = std::string("declared ") + to_string(cr.declared) + ", classified " + to_string(cr.classified);
        if (cr.inviability) {
            c.margin = cr.inviability->inequality == 1 ? cr.inviability->worst_margin1
                                                       : cr.inviability->worst_margin2;
        } else if (cr.viability) {
            c.margin = o.curve_tol - cr.viability->worst_residual;
        }
        cert.conditions.push_back(std::move(c));
    }

    bool ok = std::all_of(cert.conditions.begin(), cert.conditions.end(), [](const Condition& c) { return c.passed; });
    cert.verdict = ok ? Verdict::certified : Verdict::not_certified;
    return cert;
}

}  // namespace detail

/// Evaluates the compression-expansion conditions for (rho1, rho2, eps).
/// Throws DomainError when rho1 == rho2, a radius is nonpositive, or no branch ordering applies.
inline Certificate certify(const Problem& p, const CertifyOptions& o) {
    if (!(o.rho1 > 0.0) || !(o.rho2 > 0.0)) throw DomainError("certify: rho1 and rho2 must be positive");
    if (o.rho1 == o.rho2) throw DomainError("certify: rho1 and rho2 must differ");
    if (!(o.eps > 0.0)) throw DomainError("certify: eps must be positive");

    const double c = p.cone().c;
    const bool a_ok = o.rho1 / c < o.rho2;
    const bool b_ok = o.rho1 < o.rho2;
    std::vector<char> branches;
    if (o.branch) {
        if (*o.branch != 'a' && *o.branch != 'b') throw DomainError("certify: branch must be 'a' or 'b'");
        if ((*o.branch == 'a' && !a_ok) || (*o.branch == 'b' && !b_ok))
            throw DomainError(std::string("certify: rho ordering does not satisfy branch (") + *o.branch + ")");
        branches.push_back(*o.branch);
    } else {
        if (a_ok) branches.push_back('a');
        if (b_ok) branches.push_back('b');
        if (branches.empty())
            throw DomainError("certify: need rho1/c < rho2 (branch a) or rho1 < rho2 (branch b)");
    }

    const double m = compute_m(p.kernel(), p.weight(), p.grid());
    const double M = compute_M(p.kernel(), p.weight(), p.cone(), p.grid());
    std::vector<CurveReport> curves;
    for (const auto& cv : p.nonlinearity().curves)
        curves.push_back(classify_curve(cv, p.nonlinearity(), p.weight(), p.grid(), o.curve_tol, o.margin));

    std::optional<Certificate> first;
    for (char br : branches) {
        auto cert = detail::certify_branch(p, o, br, m, M, curves);
        if (cert.certified()) return cert;
        if (!first) first = std::move(cert);
    }
    return *first;
}

namespace detail {

inline nlohmann::ordered_json bounds_json(const BoundsReport& b) {
    return {{"value", b.value},         {"rho", b.rho},         {"eps", b.eps},
            {"method", to_string(b.method)}, {"sample_count", b.sample_count},
            {"worst_point", {b.worst_t, b.worst_u}}};
}

inline nlohmann::ordered_json curve_json(const CurveReport& c) {
    nlohmann::ordered_json j{{"label", c.label},
                             {"declared", to_string(c.declared)},
                             {"classified", to_string(c.classified)},
                             {"admissible", c.admissible}};
    if (c.viability)
        j["viability"] = {{"passed", c.viability->passed},
                          {"worst_residual", c.viability->worst_residual},
                          {"worst_t", c.viability->worst_t},
                          {"samples", c.viability->samples},
                          {"second_derivative", c.viability->finite_difference ? "finite_difference" : "supplied"}};
    if (c.inviability)
        j["inviability"] = {{"passed", c.inviability->passed},
                            {"inequality", c.inviability->inequality},
                            {"worst_margin1", c.inviability->worst_margin1},
                            {"worst_margin2", c.inviability->worst_margin2},
                            {"samples", c.inviability->samples},
                            {"second_derivative", c.inviability->finite_difference ? "finite_difference" : "supplied"}};
    return j;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const Certificate& c) {
    nlohmann::ordered_json conds = nlohmann::ordered_json::array();
    for (const auto& k : c.conditions)
        conds.push_back({{"name", k.name}, {"passed", k.passed}, {"margin", k.margin}, {"detail", k.detail}});
    nlohmann::ordered_json curves = nlohmann::ordered_json::array();
    for (const auto& cr : c.curve_reports) curves.push_back(detail::curve_json(cr));
    return {{"m", c.m},
            {"M_ab", c.M_ab},
            {"rho1", c.rho1},
            {"rho2", c.rho2},
            {"eps", c.eps},
            {"cone", {{"a", c.cone.a}, {"b", c.cone.b}, {"c", c.cone.c}}},
            {"branch", std::string(1, c.branch)},
            {"f_upper_at_rho", detail::bounds_json(c.f_upper_at_rho)},
            {"f_lower_at_rho", detail::bounds_json(c.f_lower_at_rho)},
            {"conditions", conds},
            {"annulus", {c.annulus.first, c.annulus.second}},
            {"curve_reports", curves},
            {"verdict", c.certified() ? "certified" : "not_certified"},
            {"settings",
             {{"margin", c.margin},
              {"grid_nodes", c.grid_nodes},
              {"bound_density", c.bound_density},
              {"curve_tol", c.curve_tol}}}};
}

}  // namespace sturmcert
