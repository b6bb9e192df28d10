#pragma once

// Piecewise nonlinearities f(t,u) >= 0 with declared discontinuity curves u = gamma(t),
// sampled box bounds, and viability/inviability classification of the curves.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sturmcert/cone.hpp"
#include "sturmcert/error.hpp"
#include "sturmcert/kernels.hpp"
#include "sturmcert/quadrature.hpp"

namespace sturmcert {

/// Which one-sided limit to take when (t,u) sits on a discontinuity curve.
enum class Side { below, above, on };

struct Piece {
    std::function<bool(double, double)> region;  ///< claims (t,u)
    std::function<double(double, double)> value;  ///< f_i(t,u) >= 0 on the region
    std::string label;
};

enum class CurveKind { viable, inviable, unknown };

inline const char* to_string(CurveKind k) {
    switch (k) {
    case CurveKind::viable: return "viable";
    case CurveKind::inviable: return "inviable";
    case CurveKind::unknown: return "unknown";
    }
    return "unknown";
}

struct InviableData {
    double eps = 0.0;
    std::function<double(double)> psi;
};

struct Curve {
    Interval domain{0.0, 1.0};
    std::function<double(double)> gamma;
    std::function<double(double)> gamma2;  ///< empty: central finite differences
    CurveKind declared_kind = CurveKind::unknown;
    std::optional<InviableData> inviable;
    std::string label;
};

struct Nonlinearity {
    std::vector<Piece> pieces;
    std::vector<Curve> curves;
    /// r -> R with f(t,u) <= R for u in [0,r]; sampled when empty.
    std::function<double(double)> growth_bound;
    /// Analytic overrides for the box bounds: (rho, eps) -> f^{rho,eps} and (rho, eps, cone) -> f_{rho,eps}.
    std::function<double(double, double)> user_upper;
    std::function<double(double, double, const ConeSpec&)> user_lower;

    static Nonlinearity constant(double value) {
        Nonlinearity nl;
        nl.pieces.push_back({[](double, double) { return true; }, [value](double, double) { return value; },
                             "const"});
        return nl;
    }

    /// f = low for u < threshold, f = high for u >= threshold, with the jump declared as a curve.
    static Nonlinearity step(double threshold, double low, double high) {
        Nonlinearity nl;
        nl.pieces.push_back({[threshold](double, double u) { return u < threshold; },
                             [low](double, double) { return low; }, "below"});
        nl.pieces.push_back({[threshold](double, double u) { return u >= threshold; },
                             [high](double, double) { return high; }, "above"});
        Curve c;
        c.gamma = [threshold](double) { return threshold; };
        c.gamma2 = [](double) { return 0.0; };
        c.label = "jump";
        nl.curves.push_back(std::move(c));
        return nl;
    }
};

inline double f_eval(const Nonlinearity& nl, double t, double u, Side side = Side::on) {
    if (u < 0.0) throw DomainError("f_eval: u must be nonnegative");
    double probe = u;
    const double eta = 1e-9 * std::max(1.0, std::abs(u));
    if (side == Side::below && u - eta >= 0.0) probe = u - eta;
    if (side == Side::above) probe = u + eta;
    for (const auto& p : nl.pieces) {
        if (p.region(t, probe)) {
            double v = p.value(t, u);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "f is not finite at (t,u)=(" << t << "," << u << ")";
                throw EvaluationError(os.str());
            }
            return v;
        }
    }
    std::ostringstream os;
    os << "no piece of f claims (t,u)=(" << t << "," << u << ")";
    throw CoverageError(os.str());
}

enum class BoundMethod { sampled, user_supplied };

inline const char* to_string(BoundMethod m) { return m == BoundMethod::sampled ? "sampled" : "user_supplied"; }

struct BoundsReport {
    double value = 0.0;
    BoundMethod method = BoundMethod::sampled;
    std::size_t sample_count = 0;
    double worst_t = 0.0;
    double worst_u = 0.0;
    double rho = 0.0;
    double eps = 0.0;
};

inline constexpr std::size_t default_bound_density = 400;

namespace detail {

struct BoxExtremum {
    double value = 0.0;
    double t = 0.0;
    double u = 0.0;
    std::size_t count = 0;
};

inline double lattice(Interval r, std::size_t k, std::size_t n) {
    return n == 0 ? r.lo : r.lo + r.length() * (static_cast<double>(k) / static_cast<double>(n));
}

/// Extremum of f over a box: the (density+1)^2 lattice plus both one-sided values
/// along every curve inside the box.
inline BoxExtremum box_extremum(const Nonlinearity& nl, Interval t_box, Interval u_box, std::size_t density,
                                bool maximize) {
    if (t_box.empty() || u_box.empty()) throw DomainError("empty sampling box");
    if (density == 0) density = 1;
    BoxExtremum out;
    out.value = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    auto visit = [&](double t, double u, Side side) {
        double v = f_eval(nl, t, u, side);
        ++out.count;
        if (maximize ? v > out.value : v < out.value) {
            out.value = v;
            out.t = t;
            out.u = u;
        }
    };
    for (std::size_t i = 0; i <= density; ++i) {
        double t = lattice(t_box, i, density);
        for (std::size_t j = 0; j <= density; ++j) visit(t, lattice(u_box, j, density), Side::on);
    }
    for (const auto& c : nl.curves) {
        Interval dom{std::max(c.domain.lo, t_box.lo), std::min(c.domain.hi, t_box.hi)};
        if (dom.empty()) continue;
        std::vector<double> ts{dom.lo, dom.hi};
        for (std::size_t i = 0; i <= density; ++i) {
            double t = lattice(t_box, i, density);
            if (dom.contains(t)) ts.push_back(t);
        }
        for (double t : ts) {
            double y = c.gamma(t);
            if (!u_box.contains(y)) continue;
            if (y > u_box.lo) visit(t, y, Side::below);
            if (y < u_box.hi) visit(t, y, Side::above);
            visit(t, y, Side::on);
        }
    }
    return out;
}

}  // namespace detail

/// f^{rho,eps} = sup { f(t,u)/rho : 0 <= t <= 1, 0 <= u <= rho + eps }.
inline BoundsReport f_upper(const Nonlinearity& nl, double rho, double eps,
                            std::size_t density = default_bound_density) {
    if (!(rho > 0.0) || !(eps > 0.0)) throw DomainError("f_upper requires rho > 0 and eps > 0");
    BoundsReport r;
    r.rho = rho;
    r.eps = eps;
    if (nl.user_upper) {
        r.value = nl.user_upper(rho, eps);
        r.method = BoundMethod::user_supplied;
        return r;
    }
    auto ex = detail::box_extremum(nl, {0.0, 1.0}, {0.0, rho + eps}, density, true);
    r.value = ex.value / rho;
    r.sample_count = ex.count;
    r.worst_t = ex.t;
    r.worst_u = ex.u;
    return r;
}

/// f_{rho,eps} = inf { f(t,u)/rho : a <= t <= b, c(rho-eps) <= u <= rho/c + eps }.
inline BoundsReport f_lower(const Nonlinearity& nl, double rho, double eps, const ConeSpec& spec,
                            std::size_t density = default_bound_density) {
    if (!(rho > 0.0) || !(eps >= 0.0) || !(rho > eps))
        throw DomainError("f_lower requires rho > eps >= 0 (nonempty nonnegative u-interval)");
    BoundsReport r;
    r.rho = rho;
    r.eps = eps;
    if (nl.user_lower) {
        r.value = nl.user_lower(rho, eps, spec);
        r.method = BoundMethod::user_supplied;
        return r;
    }
    Interval u_box{spec.c * (rho - eps), rho / spec.c + eps};
    auto ex = detail::box_extremum(nl, spec.interval(), u_box, density, false);
    r.value = ex.value / rho;
    r.sample_count = ex.count;
    r.worst_t = ex.t;
    r.worst_u = ex.u;
    return r;
}

/// R(r) with f(t,u) <= R(r) for t in [0,1], u in [0,r].
inline double growth_bound(const Nonlinearity& nl, double r, std::size_t density = default_bound_density) {
    if (nl.growth_bound) return nl.growth_bound(r);
    return detail::box_extremum(nl, {0.0, 1.0}, {0.0, std::max(r, 0.0)}, density, true).value;
}

namespace detail {

inline double curve_second_derivative(const Curve& c, double t, double h) {
    if (c.gamma2) return c.gamma2(t);
    return (c.gamma(t + h) - 2.0 * c.gamma(t) + c.gamma(t - h)) / (h * h);
}

inline std::vector<double> curve_nodes(const Curve& c, const Grid& grid) {
    std::vector<double> ts;
    for (double t : grid.nodes())
        if (c.domain.contains(t)) ts.push_back(t);
    if (ts.empty()) ts.push_back(0.5 * (c.domain.lo + c.domain.hi));
    return ts;
}

}  // namespace detail

struct ViabilityReport {
    bool passed = false;
    double worst_residual = 0.0;  ///< max |gamma'' + g f(t, gamma)|
    double worst_t = 0.0;
    std::size_t samples = 0;
    bool finite_difference = false;
};

/// Viable: gamma''(t) = -g(t) f(t, gamma(t)) at every grid node of the curve domain.
inline ViabilityReport check_curve_viable(const Curve& c, const Nonlinearity& nl, const Weight& g,
                                          const Grid& grid, double tol) {
    ViabilityReport r;
    r.finite_difference = !c.gamma2;
    const double h = grid.spacing();
    for (double t : detail::curve_nodes(c, grid)) {
        double res = std::abs(detail::curve_second_derivative(c, t, h) + g(t) * f_eval(nl, t, c.gamma(t), Side::on));
        ++r.samples;
        if (res > r.worst_residual || r.samples == 1) {
            r.worst_residual = res;
            r.worst_t = t;
        }
    }
    r.passed = r.worst_residual <= tol;
    return r;
}

struct InviabilityReport {
    bool passed = false;
    int inequality = 0;  ///< 1: gamma'' + psi < -g f;  2: gamma'' - psi > -g f;  0: neither
    double worst_margin1 = std::numeric_limits<double>::infinity();  ///< min (-g f - gamma'' - psi)
    double worst_margin2 = std::numeric_limits<double>::infinity();  ///< min (gamma'' - psi + g f)
    double t1 = 0, y1 = 0, t2 = 0, y2 = 0;
    std::size_t samples = 0;
    bool finite_difference = false;

    double worst_margin() const { return inequality == 1 ? worst_margin1 : worst_margin2; }
};

inline constexpr std::size_t default_band_density = 64;
inline constexpr double default_strict_margin = 1e-8;

/// Inviable: one of the strict differential inequalities holds on the eps-band around the curve.
/// The band is sampled on a uniform y-lattice plus both sides of every curve crossing it.
inline InviabilityReport check_curve_inviable(const Curve& c, const Nonlinearity& nl, const Weight& g,
                                              const Grid& grid, double margin = default_strict_margin,
                                              std::size_t band_density = default_band_density) {
    if (!c.inviable || !c.inviable->psi || !(c.inviable->eps > 0.0))
        throw ConfigError("curve '" + c.label + "' declares no inviability data (eps > 0 and psi)");
    const auto& data = *c.inviable;
    InviabilityReport r;
    r.finite_difference = !c.gamma2;
    bool strict1 = true, strict2 = true;
    const double h = grid.spacing();
    for (double t : detail::curve_nodes(c, grid)) {
        const double y0 = c.gamma(t);
        const double g2 = detail::curve_second_derivative(c, t, h);
        const double psi = data.psi(t);
        const double gt = g(t);
        Interval band{std::max(0.0, y0 - data.eps), y0 + data.eps};
        auto visit = [&](double y, Side side) {
            double rhs = -gt * f_eval(nl, t, y, side);
            double m1 = rhs - (g2 + psi);
            double m2 = (g2 - psi) - rhs;
            double scale = margin * std::max({1.0, std::abs(rhs), std::abs(g2) + std::abs(psi)});
            strict1 = strict1 && m1 > scale;
            strict2 = strict2 && m2 > scale;
            ++r.samples;
            if (m1 < r.worst_margin1) {
                r.worst_margin1 = m1;
                r.t1 = t;
                r.y1 = y;
            }
            if (m2 < r.worst_margin2) {
                r.worst_margin2 = m2;
                r.t2 = t;
                r.y2 = y;
            }
        };
        for (std::size_t j = 0; j <= band_density; ++j) visit(detail::lattice(band, j, band_density), Side::on);
        for (const auto& other : nl.curves) {
            if (!other.domain.contains(t)) continue;
            double y = other.gamma(t);
            if (!band.contains(y)) continue;
            if (y > band.lo) visit(y, Side::below);
            if (y < band.hi) visit(y, Side::above);
        }
    }
    if (strict2) {
        r.inequality = 2;
    } else if (strict1) {
        r.inequality = 1;
    }
    r.passed = r.inequality != 0;
    return r;
}

/// Classification outcome used by certificates.
struct CurveReport {
    std::string label;
    CurveKind declared = CurveKind::unknown;
    CurveKind classified = CurveKind::unknown;
    bool admissible = false;
    std::optional<ViabilityReport> viability;
    std::optional<InviabilityReport> inviability;
};

/// Checks the declared kind; undeclared curves are tried as viable, then as inviable.
inline CurveReport classify_curve(const Curve& c, const Nonlinearity& nl, const Weight& g, const Grid& grid,
                                  double viable_tol, double margin = default_strict_margin) {
    CurveReport r;
    r.label = c.label;
    r.declared = c.declared_kind;
    if (c.declared_kind != CurveKind::inviable) {
        r.viability = check_curve_viable(c, nl, g, grid, viable_tol);
        if (r.viability->passed) r.classified = CurveKind::viable;
    }
    if (r.classified == CurveKind::unknown && c.declared_kind != CurveKind::viable && c.inviable) {
        r.inviability = check_curve_inviable(c, nl, g, grid, margin);
        if (r.inviability->passed) r.classified = CurveKind::inviable;
    }
    r.admissible = r.classified != CurveKind::unknown;
    return r;
}

}  // namespace sturmcert
