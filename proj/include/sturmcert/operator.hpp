#pragma once

// Discretized Hammerstein operator T u(t_i) = int_0^1 k(t_i,s) g(s) f(s, u(s)) ds, where u(s) is the
// piecewise-linear interpolant of the nodal values. Cells in which u crosses a declared
// discontinuity curve are split at the crossing so each sub-cell sees one branch of f.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sturmcert/certifier.hpp"
#include "sturmcert/cone.hpp"
#include "sturmcert/error.hpp"
#include "sturmcert/nonlinearity.hpp"
#include "sturmcert/problem.hpp"

namespace sturmcert {

namespace detail {

struct Crossing {
    double s;
    std::size_t curve;
};

/// Root of u_lin - gamma on [x0,x1]: bisection down to h^2, then one false-position step.
inline double locate_crossing(const Curve& c, double x0, double x1, double u0, double u1, double h2) {
    auto u_lin = [&](double x) { return u0 + (u1 - u0) * (x - x0) / (x1 - x0); };
    double lo = x0, hi = x1;
    double dlo = u_lin(lo) - c.gamma(lo);
    double dhi = u_lin(hi) - c.gamma(hi);
    while (hi - lo > h2) {
        double mid = 0.5 * (lo + hi);
        double dm = u_lin(mid) - c.gamma(mid);
        if (dm == 0.0) return mid;
        if ((dm < 0.0) == (dlo < 0.0)) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
            dhi = dm;
        }
    }
    return lo - dlo * (hi - lo) / (dhi - dlo);
}

/// Quadrature of s -> k(t_i,s) g(s) f(s,u(s)) as nodal coefficients (times the cached kernel
/// columns) plus off-grid points whose kernel values are evaluated on demand.
struct SplitRule {
    std::vector<double> nodal;                     ///< coefficient of k(t_i, s_j)
    std::vector<std::pair<double, double>> extra;  ///< (s, coefficient of k(t_i, s))
};

/// g(s_j) f(s_j, u_j) at a node.
inline double node_value(const Problem& p, std::span<const double> u, std::size_t j) {
    if (u[j] < 0.0) throw DomainError("apply_T: u must be nonnegative at every node");
    return p.g_at(j) * f_eval(p.nonlinearity(), p.grid().node(j), u[j], Side::on);
}

/// Adds the contribution of cell [s_j, s_{j+1}] to `rule`, scaled by `sign`.
inline void add_cell(const Problem& p, std::span<const double> u, std::size_t j, double hv0, double hv1,
                     SplitRule& rule, double sign = 1.0) {
    const Grid& grid = p.grid();
    const Nonlinearity& nl = p.nonlinearity();
    const double s0 = grid.node(j), s1 = grid.node(j + 1);
    const double h = s1 - s0;
    auto u_at = [&](double x) { return u[j] + (u[j + 1] - u[j]) * (x - s0) / h; };

    std::vector<Crossing> cuts;
    for (std::size_t k = 0; k < nl.curves.size(); ++k) {
        const Curve& c = nl.curves[k];
        double x0 = std::max(s0, c.domain.lo), x1 = std::min(s1, c.domain.hi);
        if (!(x0 < x1)) continue;
        double d0 = u_at(x0) - c.gamma(x0);
        double d1 = u_at(x1) - c.gamma(x1);
        if (d0 * d1 < 0.0) {
            double tau = locate_crossing(c, x0, x1, u_at(x0), u_at(x1), h * h);
            if (tau > s0 && tau < s1) cuts.push_back({tau, k});
        }
    }
    if (cuts.empty()) {
        rule.nodal[j] += sign * 0.5 * h * hv0;
        rule.nodal[j + 1] += sign * 0.5 * h * hv1;
        return;
    }
    std::sort(cuts.begin(), cuts.end(), [](const Crossing& a, const Crossing& b) { return a.s < b.s; });

    // g f at a crossing `x`, seen from the sub-cell whose midpoint is `mid`.
    auto side_value = [&](double x, std::size_t curve, double mid) {
        Side side = u_at(mid) < nl.curves[curve].gamma(mid) ? Side::below : Side::above;
        return p.weight()(x) * f_eval(nl, x, std::max(0.0, u_at(x)), side);
    };

    std::vector<double> pts{s0};
    std::vector<std::optional<std::size_t>> owner{std::nullopt};
    for (const auto& c : cuts) {
        pts.push_back(c.s);
        owner.push_back(c.curve);
    }
    pts.push_back(s1);
    owner.push_back(std::nullopt);

    for (std::size_t l = 0; l + 1 < pts.size(); ++l) {
        const double a = pts[l], b = pts[l + 1];
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        if (owner[l]) rule.extra.emplace_back(a, sign * half * side_value(a, *owner[l], mid));
        else rule.nodal[j] += sign * half * hv0;
        if (owner[l + 1]) rule.extra.emplace_back(b, sign * half * side_value(b, *owner[l + 1], mid));
        else rule.nodal[j + 1] += sign * half * hv1;
    }
}

inline SplitRule split_rule(const Problem& p, std::span<const double> u) {
    const std::size_t n = p.grid().size();
    SplitRule rule;
    rule.nodal.assign(n, 0.0);
    std::vector<double> hv(n);
    for (std::size_t j = 0; j < n; ++j) hv[j] = node_value(p, u, j);
    for (std::size_t j = 0; j + 1 < n; ++j) add_cell(p, u, j, hv[j], hv[j + 1], rule);
    return rule;
}

/// (K rule)_i = sum_j k(t_i,s_j) nodal_j + sum_extra k(t_i,s) coef.
inline void apply_rule(const Problem& p, const SplitRule& rule, std::span<double> out,
                       std::size_t j_lo = 0, std::size_t j_hi = static_cast<std::size_t>(-1)) {
    const std::size_t n = p.grid().size();
    j_hi = std::min(j_hi, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = j_lo; j <= j_hi; ++j) acc += p.k_at(i, j) * rule.nodal[j];
        for (const auto& [s, coef] : rule.extra) acc += p.kernel().eval(p.grid().node(i), s) * coef;
        out[i] = acc;
    }
}

}  // namespace detail

inline GridFunction apply_T(const Problem& p, const GridFunction& u) {
    const std::size_t n = p.grid().size();
    if (u.size() != n) throw DomainError("apply_T: u lives on a different grid");
    auto rule = detail::split_rule(p, u.values());
    std::vector<double> out(n, 0.0);
    detail::apply_rule(p, rule, out);
    return GridFunction(p.grid(), std::move(out));
}

inline double residual(const Problem& p, const GridFunction& u) {
    auto tu = apply_T(p, u);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, std::abs(u[i] - tu[i]));
    return r;
}

struct QBoundReport {
    bool ok = true;
    double worst_margin = std::numeric_limits<double>::infinity();  ///< min (int_s^t M + tol - |u'(t)-u'(s)|)
    double s = 0.0, t = 0.0;
    double growth = 0.0;  ///< R with M(t) = g(t) R
    double tolerance = 0.0;
};

/// Checks |u'(t) - u'(s)| <= int_s^t M(r) dr over all node pairs, M = g * growth_bound(radius),
/// with finite-difference derivatives and an O(h) allowance.
inline QBoundReport q_bound_check(const GridFunction& u, const Problem& p, double radius) {
    QBoundReport r;
    r.growth = growth_bound(p.nonlinearity(), radius);
    const Grid& grid = u.grid();
    const std::size_t n = grid.size();
    std::vector<double> mvals(n);
    for (std::size_t i = 0; i < n; ++i) mvals[i] = p.weight()(grid.node(i)) * r.growth;
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cum[i] = cum[i - 1] + 0.5 * (grid.node(i) - grid.node(i - 1)) * (mvals[i] + mvals[i - 1]);

    std::vector<double> du(n);
    if (n == 2) {
        du[0] = du[1] = (u[1] - u[0]) / (grid.node(1) - grid.node(0));
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i)
            du[i] = (u[i + 1] - u[i - 1]) / (grid.node(i + 1) - grid.node(i - 1));
        double h0 = grid.node(1) - grid.node(0), h1 = grid.node(n - 1) - grid.node(n - 2);
        du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h0);
        du[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h1);
    }
    double mmax = *std::max_element(mvals.begin(), mvals.end());
    r.tolerance = 2.0 * grid.spacing() * mmax + 1e-9;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double margin = (cum[j] - cum[i]) + r.tolerance - std::abs(du[j] - du[i]);
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.s = grid.node(i);
                r.t = grid.node(j);
            }
        }
    }
    r.ok = r.worst_margin >= 0.0;
    return r;
}

enum class SolveMethod { picard, newton, automatic };

inline const char* to_string(SolveMethod m) {
    switch (m) {
    case SolveMethod::picard: return "picard";
    case SolveMethod::newton: return "newton";
    case SolveMethod::automatic: return "auto";
    }
    return "auto";
}

struct SolveOptions {
    double theta = 0.5;
    double tol = 1e-10;
    std::size_t max_iter = 2000;
    std::size_t max_newton = 60;
    /// Newton restarts with previously found roots deflated (automatic mode).
    std::size_t max_deflations = 3;
    /// Extra Newton starts: the initial guess rescaled to norms inside the annulus.
    std::size_t annulus_starts = 5;
    SolveMethod method = SolveMethod::automatic;
    /// Localization (r_min, r_max) from a certificate; checked strictly.
    std::optional<std::pair<double, double>> annulus;
    /// Radius bounding the solution norm for the Q-set check (rho2/c for certified problems).
    std::optional<double> q_radius;
    /// Divergence is declared when the iterate norm exceeds this.
    std::optional<double> divergence_radius;
    double cone_tol = default_cone_tol;
};

/// Annulus, Q-radius rho2/c and divergence radius 10 rho2/c taken from a certificate.
inline SolveOptions with_certificate(SolveOptions base, const Certificate& cert) {
    base.annulus = cert.annulus;
    base.q_radius = cert.annulus.second / cert.cone.c;
    base.divergence_radius = 10.0 * cert.annulus.second / cert.cone.c;
    return base;
}

struct Solution {
    GridFunction u;
    GridFunction Tu;
    double residual_sup = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool stagnated = false;
    SolveMethod method = SolveMethod::picard;
    bool in_cone = false;
    double norm = 0.0;
    std::optional<bool> annulus_ok{};
    bool q_bound_ok = false;
    QBoundReport q_report{};
    std::vector<double> history{};  ///< residual per iteration
    std::string note{};
};

namespace detail {

inline double sup_diff(std::span<const double> a, std::span<const double> b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

struct Iterate {
    std::vector<double> u;
    std::vector<double> tu{};
    double res = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
    bool stagnated = false;
    std::vector<double> history{};
};

inline void guard(const std::optional<double>& radius, double norm, std::vector<double>& trace) {
    trace.push_back(norm);
    if (radius && norm > *radius)
        throw DivergenceError("iteration diverged: norm " + std::to_string(norm) + " exceeds " +
                                  std::to_string(*radius),
                              trace);
}

inline Iterate picard(const Problem& p, const GridFunction& init, const SolveOptions& o) {
    Iterate it;
    it.u.assign(init.values().begin(), init.values().end());
    std::vector<double> trace;
    std::vector<double> best_u = it.u;
    double best = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    constexpr std::size_t patience = 200;

    for (std::size_t k = 0; k < o.max_iter; ++k) {
        auto tu = apply_T(p, GridFunction(p.grid(), it.u));
        double res = sup_diff(it.u, tu.values());
        it.history.push_back(res);
        if (res < best) {
            if (res < 0.999 * best) since_best = 0;
            best = res;
            best_u = it.u;
        }
        if (res <= o.tol) {
            it.res = res;
            it.converged = true;
            it.iterations = k;
            return it;
        }
        if (++since_best > patience) {
            it.stagnated = true;
            break;
        }
        for (std::size_t i = 0; i < it.u.size(); ++i) it.u[i] = (1.0 - o.theta) * it.u[i] + o.theta * tu[i];
        guard(o.divergence_radius, norm_sup(GridFunction(p.grid(), it.u)), trace);
        it.iterations = k + 1;
    }
    // Final check after the last update.
    auto tu = apply_T(p, GridFunction(p.grid(), it.u));
    double res = sup_diff(it.u, tu.values());
    if (res <= o.tol) {
        it.res = res;
        it.converged = true;
        it.stagnated = false;
        return it;
    }
    if (res < best) {
        best = res;
        best_u = it.u;
    }
    it.u = best_u;
    it.res = best;
    return it;
}

/// Forward-difference Jacobian of F(u) = u - T u. Moving u_j only changes node j and the two
/// adjacent cells, so each column is the kernel applied to a local rule difference.
inline Eigen::MatrixXd jacobian(const Problem& p, const std::vector<double>& u) {
    const std::size_t n = p.grid().size();
    std::vector<double> hv(n);
    for (std::size_t j = 0; j < n; ++j) hv[j] = node_value(p, u, j);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    SplitRule diff;
    std::vector<double> col(n);
    std::vector<double> up = u;
    for (std::size_t j = 0; j < n; ++j) {
        const double step = 1e-7 * std::max(1.0, std::abs(u[j]));
        up[j] = u[j] + step;
        const double hvj = node_value(p, up, j);
        const std::size_t lo = j > 0 ? j - 1 : 0;
        const std::size_t hi = std::min(j + 1, n - 1);
        diff.nodal.assign(n, 0.0);
        diff.extra.clear();
        for (std::size_t cell = lo; cell < hi; ++cell) {
            add_cell(p, up, cell, cell == j ? hvj : hv[cell], cell + 1 == j ? hvj : hv[cell + 1], diff, 1.0);
            add_cell(p, u, cell, hv[cell], hv[cell + 1], diff, -1.0);
        }
        up[j] = u[j];
        apply_rule(p, diff, col, lo, hi);
        for (std::size_t i = 0; i < n; ++i)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= col[i] / step;
    }
    return J;
}

/// Newton's method on F(u) = u - T u with a forward-difference Jacobian and backtracking.
/// T is continuous in the nodal values because crossings move continuously with u.
/// Known roots r_k are deflated: the iteration runs on prod_k (1/|u - r_k|^2 + 1) F(u), so it
/// cannot converge to them again.
inline Iterate newton(const Problem& p, const GridFunction& init, const SolveOptions& o,
                      const std::vector<std::vector<double>>& deflated = {}) {
    const std::size_t n = p.grid().size();
    const auto w = p.grid().weights();
    Iterate it;
    it.u.assign(init.values().begin(), init.values().end());
    std::vector<double> trace;

    auto F = [&](const std::vector<double>& u) {
        auto tu = apply_T(p, GridFunction(p.grid(), u));
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = u[i] - tu[i];
        return f;
    };
    auto inf_norm = [](const std::vector<double>& v) {
        double r = 0.0;
        for (double x : v) r = std::max(r, std::abs(x));
        return r;
    };
    // Deflation factor and the gradient of its logarithm (discrete L2 norm).
    auto deflation = [&](const std::vector<double>& u, std::vector<double>* grad_log) {
        double factor = 1.0;
        if (grad_log) grad_log->assign(n, 0.0);
        for (const auto& r : deflated) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) d2 += w[i] * (u[i] - r[i]) * (u[i] - r[i]);
            d2 = std::max(d2, 1e-300);
            double mk = 1.0 / d2 + 1.0;
            factor *= mk;
            if (grad_log)
                for (std::size_t i = 0; i < n; ++i) (*grad_log)[i] += (-2.0 * w[i] * (u[i] - r[i]) / (d2 * d2)) / mk;
        }
        return factor;
    };

    auto fu = F(it.u);
    double res = inf_norm(fu);
    double merit = deflation(it.u, nullptr) * res;
    it.history.push_back(res);
    for (std::size_t k = 0; k < o.max_newton && res > o.tol; ++k) {
        auto J = jacobian(p, it.u);
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -fu[i];
        Eigen::VectorXd delta = J.partialPivLu().solve(rhs);
        if (!deflated.empty()) {
            std::vector<double> gl;
            deflation(it.u, &gl);
            double wd = 0.0;
            for (std::size_t i = 0; i < n; ++i) wd += gl[i] * delta(static_cast<Eigen::Index>(i));
            if (std::abs(1.0 - wd) > 1e-12) delta /= (1.0 - wd);
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = std::max(0.0, it.u[i] + lambda * delta(static_cast<Eigen::Index>(i)));
            auto ft = F(trial);
            double rt = inf_norm(ft);
            double mt = deflation(trial, nullptr) * rt;
            if (mt < (1.0 - 1e-4 * lambda) * merit) {
                it.u = std::move(trial);
                fu = std::move(ft);
                res = rt;
                merit = mt;
                accepted = true;
                break;
            }
        }
        it.iterations = k + 1;
        it.history.push_back(res);
        guard(o.divergence_radius, inf_norm(it.u), trace);
        if (!accepted) {
            it.stagnated = true;
            break;
        }
    }
    it.res = res;
    it.converged = res <= o.tol;
    return it;
}

}  // namespace detail

namespace detail {

inline Solution finish(const Problem& p, Iterate it, SolveMethod method, const SolveOptions& o) {
    GridFunction u(p.grid(), std::move(it.u));
    Solution s{.u = u, .Tu = apply_T(p, u)};
    s.residual_sup = sup_diff(s.u.values(), s.Tu.values());
    s.iterations = it.iterations;
    s.converged = s.residual_sup <= o.tol;
    s.stagnated = it.stagnated;
    s.method = method;
    s.history = std::move(it.history);
    s.norm = norm_sup(s.u);
    s.in_cone = cone_member(s.u, p.cone(), o.cone_tol);
    if (o.annulus) s.annulus_ok = s.norm > o.annulus->first + o.cone_tol && s.norm < o.annulus->second - o.cone_tol;
    s.q_report = q_bound_check(s.u, p, o.q_radius.value_or(s.norm));
    s.q_bound_ok = s.q_report.ok;
    return s;
}

inline bool acceptable(const Solution& s) { return s.converged && s.annulus_ok.value_or(true); }

}  // namespace detail

/// Damped Picard iteration u <- (1-theta) u + theta T u. In automatic mode, when Picard does not
/// converge or converges outside the certified annulus, Newton runs from `init` with every root
/// found so far deflated: Picard only finds fixed points that are attracting for T.
inline Solution solve_fixed_point(const Problem& p, const GridFunction& init, const SolveOptions& o = {}) {
    if (!(o.theta > 0.0 && o.theta <= 1.0)) throw DomainError("damping theta must lie in (0,1]");
    if (init.size() != p.grid().size()) throw DomainError("initial guess lives on a different grid");
    if (!cone_member(init, p.cone(), o.cone_tol)) throw DomainError("initial guess is not in the cone");

    if (o.method == SolveMethod::picard) return detail::finish(p, detail::picard(p, init, o), SolveMethod::picard, o);
    if (o.method == SolveMethod::newton) return detail::finish(p, detail::newton(p, init, o), SolveMethod::newton, o);

    std::vector<Solution> found;
    std::vector<std::vector<double>> roots;
    std::string note;
    try {
        auto sol = detail::finish(p, detail::picard(p, init, o), SolveMethod::picard, o);
        if (detail::acceptable(sol)) return sol;
        note = sol.converged ? "picard converged outside the annulus" : "picard did not converge";
        if (sol.converged) roots.emplace_back(sol.u.values().begin(), sol.u.values().end());
        found.push_back(std::move(sol));
    } catch (const DivergenceError&) {
        note = "picard diverged";
    }
    // Starts: the initial guess, then the guess rescaled to norms spread geometrically over the annulus.
    std::vector<GridFunction> starts{init};
    const double init_norm = norm_sup(init);
    if (o.annulus && init_norm > 0.0) {
        const auto [lo, hi] = *o.annulus;
        for (std::size_t k = 0; k < o.annulus_starts; ++k) {
            double target = lo * std::pow(hi / lo, (static_cast<double>(k) + 0.5) / static_cast<double>(o.annulus_starts));
            starts.push_back(init.scaled(target / init_norm));
        }
    }
    for (std::size_t si = 0; si < starts.size(); ++si) {
        for (std::size_t round = 0; round <= o.max_deflations; ++round) {
            Solution sol = [&] {
                try {
                    return detail::finish(p, detail::newton(p, starts[si], o, roots), SolveMethod::newton, o);
                } catch (const DivergenceError&) {
                    return detail::finish(p, detail::Iterate{.u = {starts[si].values().begin(), starts[si].values().end()}},
                                          SolveMethod::newton, o);
                }
            }();
            note += "; newton from start " + std::to_string(si) + " with " + std::to_string(roots.size()) +
                    " deflated root(s)";
            if (detail::acceptable(sol)) {
                sol.note = note;
                return sol;
            }
            if (!sol.converged) {
                found.push_back(std::move(sol));
                break;
            }
            roots.emplace_back(sol.u.values().begin(), sol.u.values().end());
            found.push_back(std::move(sol));
        }
    }
    // Nothing acceptable: prefer a converged iterate, then the smaller residual.
    auto best = std::min_element(found.begin(), found.end(), [](const Solution& a, const Solution& b) {
        if (a.converged != b.converged) return a.converged;
        return a.residual_sup < b.residual_sup;
    });
    if (best == found.end()) throw DivergenceError("no iterate could be formed", {});
    best->note = note + "; no fixed point located in the annulus";
    return *best;
}

/// Random element of the cone: lambda * Phi / |Phi| plus nonnegative noise, lifted by a constant
/// until min_{[a,b]} u >= c |u|.
template <class Rng>
GridFunction random_cone_member(const Grid& grid, const ConeSpec& spec, const std::function<double(double)>& phi,
                                Rng& rng, double scale_max = 10.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lambda = scale_max * unit(rng);
    const double noise = unit(rng);
    if (spec.c >= 1.0) return GridFunction(grid, std::vector<double>(grid.size(), lambda));

    auto shape = GridFunction::sample(grid, phi);
    double pn = norm_sup(shape);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double base = pn > 0.0 ? shape[i] / pn : 1.0;
        v[i] = lambda * (base + noise * unit(rng));
    }
    GridFunction u(grid, v);
    double lo = min_on(u, spec.interval());
    double nrm = norm_sup(u);
    double lift = std::max(0.0, (spec.c * nrm - lo) / (1.0 - spec.c));
    for (double& x : v) x += lift;
    return GridFunction(grid, std::move(v));
}

struct ConeProbeReport {
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t input_failures = 0;  ///< generated members that were not in the cone
    double worst_margin = std::numeric_limits<double>::infinity();  ///< min over trials of min_[a,b] Tu - c |Tu|
    std::uint64_t seed = 0;
};

/// Applies T to `trials` seeded random cone members and checks T u stays in the cone.
inline ConeProbeReport cone_mapping_probe(const Problem& p, std::size_t trials, std::uint64_t seed,
                                          double scale_max = 10.0, double tol = default_cone_tol) {
    ConeProbeReport r;
    r.trials = trials;
    r.seed = seed;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < trials; ++k) {
        auto u = random_cone_member(p.grid(), p.cone(), p.kernel().phi, rng, scale_max);
        if (!cone_member(u, p.cone(), tol)) ++r.input_failures;
        auto tu = apply_T(p, u);
        r.worst_margin = std::min(r.worst_margin, min_on(tu, p.cone().interval()) - p.cone().c * norm_sup(tu));
        if (!cone_member(tu, p.cone(), tol)) ++r.failures;
    }
    return r;
}

}  // namespace sturmcert
