#pragma once

// Weighted composite quadrature on [0,1] and sup/inf of parametric integrals
// t -> int_{s_range} k(t,s) g(s) ds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sturmcert/error.hpp"

namespace sturmcert {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool empty() const noexcept { return !(lo <= hi); }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    double length() const noexcept { return hi - lo; }
};

/// Composite trapezoid rule on an ordered partition of [0,1].
class Grid {
public:
    static Grid uniform(std::size_t n) {
        if (n < 2) throw DomainError("grid needs at least 2 nodes, got " + std::to_string(n));
        std::vector<double> nodes(n);
        for (std::size_t i = 0; i < n; ++i)
            nodes[i] = static_cast<double>(i) / static_cast<double>(n - 1);
        nodes.back() = 1.0;
        return Grid(std::move(nodes));
    }

    explicit Grid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2) throw DomainError("grid needs at least 2 nodes");
        if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
            throw DomainError("grid must start at 0 and end at 1");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i] > nodes_[i - 1])) throw DomainError("grid nodes must be strictly increasing");
        weights_.assign(nodes_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
            double h = nodes_[i + 1] - nodes_[i];
            weights_[i] += 0.5 * h;
            weights_[i + 1] += 0.5 * h;
        }
    }

    /// Inserts the midpoint of every cell (n -> 2n-1 nodes); old nodes are kept.
    Grid refined() const {
        std::vector<double> out;
        out.reserve(2 * nodes_.size() - 1);
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
            out.push_back(nodes_[i]);
            out.push_back(0.5 * (nodes_[i] + nodes_[i + 1]));
        }
        out.push_back(1.0);
        return Grid(std::move(out));
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Largest cell width.
    double spacing() const noexcept {
        double h = 0.0;
        for (std::size_t i = 1; i < nodes_.size(); ++i) h = std::max(h, nodes_[i] - nodes_[i - 1]);
        return h;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Nonnegative weight g on (0,1), either a callable or tabulated samples.
class Weight {
public:
    using Fn = std::function<double(double)>;

    Weight() : Weight(constant(1.0)) {}
    explicit Weight(Fn g) : g_(std::move(g)) {}

    static Weight constant(double v) {
        if (v < 0.0) throw DomainError("weight must be nonnegative");
        return Weight([v](double) { return v; });
    }

    /// Piecewise-linear interpolation of (s, g) samples; s must be increasing.
    static Weight tabulated(std::vector<double> s, std::vector<double> g) {
        if (s.size() != g.size() || s.size() < 2)
            throw DomainError("tabulated weight needs >= 2 matching (s, g) samples");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (g[i] < 0.0 || !std::isfinite(g[i]))
                throw DomainError("tabulated weight sample " + std::to_string(i) + " is negative or non-finite");
            if (i > 0 && !(s[i] > s[i - 1])) throw DomainError("tabulated weight abscissae must increase");
        }
        Weight w([s, g](double x) {
            if (x <= s.front()) return g.front();
            if (x >= s.back()) return g.back();
            auto it = std::upper_bound(s.begin(), s.end(), x);
            std::size_t j = static_cast<std::size_t>(it - s.begin());
            double th = (x - s[j - 1]) / (s[j] - s[j - 1]);
            return (1.0 - th) * g[j - 1] + th * g[j];
        });
        w.samples_ = std::move(s);
        w.values_ = std::move(g);
        return w;
    }

    double operator()(double s) const { return g_(s); }

    /// Returns a weight scaled by `factor` >= 0.
    Weight scaled(double factor) const {
        Fn g = g_;
        return Weight([g, factor](double s) { return factor * g(s); });
    }

    bool is_tabulated() const noexcept { return !samples_.empty(); }
    std::span<const double> sample_points() const noexcept { return samples_; }
    std::span<const double> sample_values() const noexcept { return values_; }

private:
    Fn g_;
    std::vector<double> samples_;
    std::vector<double> values_;
};

namespace detail {

inline double checked(double v, const char* what, double at) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " is not finite at node s=" << at;
        throw EvaluationError(os.str());
    }
    return v;
}

inline double checked_weight(const Weight& g, double s) {
    double v = checked(g(s), "weight g", s);
    if (v < 0.0) {
        std::ostringstream os;
        os << "weight g is negative (" << v << ") at s=" << s;
        throw DomainError(os.str());
    }
    return v;
}

/// Breakpoints of [lo,hi]: the grid nodes strictly inside plus both ends and any extra cut points.
inline std::vector<double> partition(const Grid& grid, Interval r, std::initializer_list<double> cuts = {}) {
    std::vector<double> pts{r.lo};
    for (double x : grid.nodes())
        if (x > r.lo && x < r.hi) pts.push_back(x);
    for (double c : cuts)
        if (c > r.lo && c < r.hi) pts.push_back(c);
    pts.push_back(r.hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

inline void check_range(Interval r, const char* name) {
    if (r.empty()) throw DomainError(std::string(name) + " is empty");
    if (r.lo < 0.0 || r.hi > 1.0) throw DomainError(std::string(name) + " must lie in [0,1]");
}

}  // namespace detail

/// Composite-trapezoid approximation of int_0^1 h(s) g(s) ds on `grid`.
template <class H>
double integrate_weighted(const H& h, const Weight& g, const Grid& grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = grid.node(i);
        double hv = detail::checked(static_cast<double>(h(s)), "integrand h", s);
        sum += grid.weight(i) * hv * detail::checked_weight(g, s);
    }
    return sum;
}

/// Trapezoid over [r.lo, r.hi] using the grid nodes inside plus extra cut points.
template <class H>
double integrate_weighted_on(const H& h, const Weight& g, const Grid& grid, Interval r,
                             std::initializer_list<double> cuts = {}) {
    detail::check_range(r, "integration range");
    auto pts = detail::partition(grid, r, cuts);
    double sum = 0.0;
    double prev = detail::checked(static_cast<double>(h(pts[0])), "integrand h", pts[0]) *
                  detail::checked_weight(g, pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double cur = detail::checked(static_cast<double>(h(pts[i])), "integrand h", pts[i]) *
                     detail::checked_weight(g, pts[i]);
        sum += 0.5 * (pts[i] - pts[i - 1]) * (prev + cur);
        prev = cur;
    }
    return sum;
}

/// One Richardson step for a second-order rule: (4 I_{h/2} - I_h) / 3.
inline double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

/// Result of a sup/inf scan over t.
struct ParamExtremum {
    double value = 0.0;         ///< refined estimate
    double arg = 0.0;           ///< maximizing / minimizing t
    double coarse_value = 0.0;  ///< extremum over the grid-level t scan
    double coarse_arg = 0.0;
};

namespace detail {

template <class K>
ParamExtremum param_extremum(const K& k, const Weight& g, Interval t_range, Interval s_range,
                             const Grid& grid, bool maximize) {
    check_range(t_range, "t range");
    check_range(s_range, "s range");

    // The kernel may kink on the diagonal, so t is also a cut point of the s-partition.
    auto integral = [&](double t) {
        return integrate_weighted_on([&](double s) { return k(t, s); }, g, grid, s_range, {t});
    };
    auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };

    std::vector<double> ts = partition(grid, t_range);
    ParamExtremum out;
    out.coarse_arg = ts.front();
    out.coarse_value = integral(ts.front());
    std::size_t best = 0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        double v = integral(ts[i]);
        if (better(v, out.coarse_value)) {
            out.coarse_value = v;
            out.coarse_arg = ts[i];
            best = i;
        }
    }
    out.value = out.coarse_value;
    out.arg = out.coarse_arg;

    // Local refinement on the neighbouring cells of the coarse extremum.
    double lo = best > 0 ? ts[best - 1] : ts[best];
    double hi = best + 1 < ts.size() ? ts[best + 1] : ts[best];
    constexpr int sub = 32;
    for (int j = 0; j <= sub && hi > lo; ++j) {
        double t = lo + (hi - lo) * j / sub;
        double v = integral(t);
        if (better(v, out.value)) {
            out.value = v;
            out.arg = t;
        }
    }
    return out;
}

}  // namespace detail

/// sup over t in t_range of int_{s_range} k(t,s) g(s) ds.
template <class K>
ParamExtremum sup_param_integral(const K& k, const Weight& g, Interval t_range, Interval s_range,
                                 const Grid& grid) {
    return detail::param_extremum(k, g, t_range, s_range, grid, true);
}

/// inf over t in t_range of int_{s_range} k(t,s) g(s) ds.
template <class K>
ParamExtremum inf_param_integral(const K& k, const Weight& g, Interval t_range, Interval s_range,
                                 const Grid& grid) {
    return detail::param_extremum(k, g, t_range, s_range, grid, false);
}

}  // namespace sturmcert
