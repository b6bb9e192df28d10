#pragma once

// Green's function of
//   u'' + g(t) f(t,u) = 0,  alpha u(0) - beta u'(0) = 0,  gamma u(1) + delta u'(1) = 0,
// its diagonal envelope Phi(s) = G(s,s), and the cone constants (a, b, c).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "sturmcert/error.hpp"
#include "sturmcert/quadrature.hpp"

namespace sturmcert {

struct BoundaryParams {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 0.0;

    double Gamma() const noexcept { return gamma * beta + alpha * gamma + alpha * delta; }

    void validate() const {
        if (alpha < 0 || beta < 0 || gamma < 0 || delta < 0)
            throw ParameterError("boundary coefficients alpha, beta, gamma, delta must be >= 0");
        if (!(Gamma() > 0.0))
            throw ParameterError("Gamma = gamma*beta + alpha*gamma + alpha*delta must be > 0");
    }

    static BoundaryParams dirichlet() { return {1.0, 0.0, 1.0, 0.0}; }

    bool operator==(const BoundaryParams&) const = default;
};

/// Interval [a,b] on which cone members are bounded below by c times their norm.
struct ConeSpec {
    double a = 0.0;
    double b = 1.0;
    double c = 1.0;

    Interval interval() const noexcept { return {a, b}; }

    void validate() const {
        if (!(a < b) || a < 0.0 || b > 1.0) throw DomainError("cone interval must satisfy 0 <= a < b <= 1");
        if (!(c > 0.0 && c <= 1.0)) throw DomainError("cone constant c must lie in (0,1]");
    }

    bool operator==(const ConeSpec&) const = default;
};

using ConeParams = ConeSpec;

/// Nonnegative kernel k(t,s) with upper envelope Phi and cone data.
struct Kernel {
    std::function<double(double, double)> eval;
    std::function<double(double)> phi;
    ConeSpec cone;
    /// True for kernels built from boundary coefficients; custom kernels must pass verify_h4.
    bool is_green = false;

    double operator()(double t, double s) const { return eval(t, s); }
};

namespace detail {

inline double green_unchecked(const BoundaryParams& bc, double t, double s) {
    const double G = bc.Gamma();
    if (s <= t) return (bc.gamma + bc.delta - bc.gamma * t) * (bc.beta + bc.alpha * s) / G;
    return (bc.beta + bc.alpha * t) * (bc.gamma + bc.delta - bc.gamma * s) / G;
}

}  // namespace detail

/// G(t,s); the diagonal t = s is taken from the s <= t branch.
inline double green_eval(const BoundaryParams& bc, double t, double s) {
    bc.validate();
    if (t < 0.0 || t > 1.0 || s < 0.0 || s > 1.0) throw DomainError("green_eval: t and s must lie in [0,1]");
    return detail::green_unchecked(bc, t, s);
}

/// Phi(s) = G(s,s).
inline std::function<double(double)> phi_of(const BoundaryParams& bc) {
    bc.validate();
    return [bc](double s) {
        return (bc.gamma + bc.delta - bc.gamma * s) * (bc.beta + bc.alpha * s) / bc.Gamma();
    };
}

/// Checks -beta/alpha < a < b < 1 + delta/gamma (each side vacuous when alpha resp. gamma is 0)
/// and returns c = min{(gamma+delta-gamma b)/(gamma+delta), (beta+alpha a)/(alpha+beta)}.
inline ConeParams cone_params(const BoundaryParams& bc, double a, double b) {
    bc.validate();
    auto fail = [](const std::string& what) { throw AdmissibilityError("cone interval violates " + what); };
    if (a < 0.0 || b > 1.0) fail("a, b in [0,1]");
    if (!(a < b)) fail("a < b");
    if (bc.alpha > 0.0 && !(-bc.beta / bc.alpha < a)) fail("-beta/alpha < a");
    if (bc.gamma > 0.0 && !(b < 1.0 + bc.delta / bc.gamma)) fail("b < 1 + delta/gamma");

    // alpha+beta and gamma+delta are positive whenever Gamma > 0.
    double right = (bc.gamma + bc.delta - bc.gamma * b) / (bc.gamma + bc.delta);
    double left = (bc.beta + bc.alpha * a) / (bc.alpha + bc.beta);
    return ConeParams{a, b, std::min(right, left)};
}

inline Kernel make_green_kernel(const BoundaryParams& bc, double a, double b) {
    Kernel k;
    k.cone = cone_params(bc, a, b);
    k.eval = [bc](double t, double s) { return detail::green_unchecked(bc, t, s); };
    k.phi = phi_of(bc);
    k.is_green = true;
    return k;
}

/// Outcome of checking k <= Phi on [0,1]^2 and c Phi <= k on [a,b] x [0,1].
struct H4Report {
    bool passed = true;
    double worst_upper_margin = std::numeric_limits<double>::infinity();  ///< min Phi(s) - k(t,s)
    double worst_lower_margin = std::numeric_limits<double>::infinity();  ///< min k(t,s) - c Phi(s)
    double upper_t = 0, upper_s = 0;
    double lower_t = 0, lower_s = 0;
    std::size_t checked_points = 0;

    std::string describe() const {
        std::ostringstream os;
        os << (passed ? "pass" : "fail") << ": min(Phi-k)=" << worst_upper_margin << " at (t,s)=("
           << upper_t << "," << upper_s << "), min(k-c*Phi)=" << worst_lower_margin << " at (t,s)=("
           << lower_t << "," << lower_s << ")";
        return os.str();
    }
};

/// Grid-product check of both kernel-envelope inequalities; `tol` absorbs rounding.
inline H4Report verify_h4(const Kernel& kernel, const Grid& grid, double tol = 1e-12) {
    H4Report r;
    const auto ts = grid.nodes();
    std::vector<double> phi(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) phi[j] = kernel.phi(ts[j]);

    // Interpolated endpoints a and b count as t-samples of the lower bound too.
    std::vector<double> lower_ts{kernel.cone.a, kernel.cone.b};
    for (double t : ts)
        if (t > kernel.cone.a && t < kernel.cone.b) lower_ts.push_back(t);

    for (double t : ts) {
        for (std::size_t j = 0; j < ts.size(); ++j) {
            double m = phi[j] - kernel.eval(t, ts[j]);
            ++r.checked_points;
            if (m < r.worst_upper_margin) {
                r.worst_upper_margin = m;
                r.upper_t = t;
                r.upper_s = ts[j];
            }
        }
    }
    for (double t : lower_ts) {
        for (std::size_t j = 0; j < ts.size(); ++j) {
            double m = kernel.eval(t, ts[j]) - kernel.cone.c * phi[j];
            ++r.checked_points;
            if (m < r.worst_lower_margin) {
                r.worst_lower_margin = m;
                r.lower_t = t;
                r.lower_s = ts[j];
            }
        }
    }
    r.passed = r.worst_upper_margin >= -tol && r.worst_lower_margin >= -tol;
    return r;
}

}  // namespace sturmcert
