#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "sturmcert/error.hpp"
#include "sturmcert/kernels.hpp"
#include "sturmcert/quadrature.hpp"

namespace sturmcert {

/// Values of a function at the nodes of a grid.
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size()) throw DomainError("grid function length does not match its grid");
        for (double v : values_)
            if (!std::isfinite(v)) throw EvaluationError("grid function has a non-finite value");
    }

    static GridFunction sample(const Grid& grid, const std::function<double(double)>& fn) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fn(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    static GridFunction zeros(const Grid& grid) { return GridFunction(grid, std::vector<double>(grid.size(), 0.0)); }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Piecewise-linear interpolant.
    double at(double t) const {
        auto nodes = grid_.nodes();
        if (t <= nodes.front()) return values_.front();
        if (t >= nodes.back()) return values_.back();
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        std::size_t j = static_cast<std::size_t>(it - nodes.begin());
        double th = (t - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
        return (1.0 - th) * values_[j - 1] + th * values_[j];
    }

    GridFunction scaled(double lambda) const {
        std::vector<double> v(values_);
        for (double& x : v) x *= lambda;
        return GridFunction(grid_, std::move(v));
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

inline double norm_sup(const GridFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

/// min over [lo,hi] using the nodes inside plus the interpolated endpoints.
inline double min_on(const GridFunction& u, Interval r) {
    double m = std::min(u.at(r.lo), u.at(r.hi));
    auto nodes = u.grid().nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] > r.lo && nodes[i] < r.hi) m = std::min(m, u[i]);
    return m;
}

inline constexpr double default_cone_tol = 1e-9;

inline bool cone_member(const GridFunction& u, const ConeSpec& spec, double tol = default_cone_tol) {
    if (tol < 0.0) throw DomainError("cone tolerance must be nonnegative");
    double lowest = *std::min_element(u.values().begin(), u.values().end());
    if (lowest < -tol) return false;
    return min_on(u, spec.interval()) >= spec.c * norm_sup(u) - tol;
}

/// min_{[a,b]} u - rho; zero means u sits on the relative boundary of V_rho.
inline double v_rho_boundary_distance(const GridFunction& u, const ConeSpec& spec, double rho,
                                      double tol = default_cone_tol) {
    if (!cone_member(u, spec, tol)) throw DomainError("v_rho_boundary_distance: u is not in the cone");
    return min_on(u, spec.interval()) - rho;
}

}  // namespace sturmcert
