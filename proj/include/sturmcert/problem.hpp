#pragma once

#include <utility>
#include <vector>

#include "sturmcert/error.hpp"
#include "sturmcert/kernels.hpp"
#include "sturmcert/nonlinearity.hpp"
#include "sturmcert/quadrature.hpp"

namespace sturmcert {

/// Hammerstein problem u = T u with T u(t) = int_0^1 k(t,s) g(s) f(s, u(s)) ds.
/// Immutable once built; caches the kernel at the grid nodes.
class Problem {
public:
    Problem(Kernel kernel, Weight g, Nonlinearity f, Grid grid)
        : kernel_(std::move(kernel)), g_(std::move(g)), f_(std::move(f)), grid_(std::move(grid)) {
        kernel_.cone.validate();
        h4_ = verify_h4(kernel_, grid_);
        if (!h4_.passed) throw ParameterError("kernel envelope check failed: " + h4_.describe());
        phi_g_ab_ = integrate_weighted_on([&](double s) { return kernel_.phi(s); }, g_, grid_,
                                          kernel_.cone.interval());
        if (!(phi_g_ab_ > 0.0)) throw DegenerateError("int_a^b Phi(s) g(s) ds must be positive");

        const std::size_t n = grid_.size();
        kmat_.resize(n * n);
        gvals_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            gvals_[i] = detail::checked_weight(g_, grid_.node(i));
            for (std::size_t j = 0; j < n; ++j) kmat_[i * n + j] = kernel_.eval(grid_.node(i), grid_.node(j));
        }
    }

    const Kernel& kernel() const noexcept { return kernel_; }
    const Weight& weight() const noexcept { return g_; }
    const Nonlinearity& nonlinearity() const noexcept { return f_; }
    const Grid& grid() const noexcept { return grid_; }
    const ConeSpec& cone() const noexcept { return kernel_.cone; }
    const H4Report& h4() const noexcept { return h4_; }
    double phi_g_integral_ab() const noexcept { return phi_g_ab_; }

    /// k(t_i, s_j) at grid nodes.
    double k_at(std::size_t i, std::size_t j) const { return kmat_[i * grid_.size() + j]; }
    double g_at(std::size_t j) const { return gvals_[j]; }

    /// Same problem with a different grid (kernel cache rebuilt).
    Problem with_grid(Grid grid) const { return Problem(kernel_, g_, f_, std::move(grid)); }

    /// Same problem with g replaced by factor * g.
    Problem with_weight(Weight g) const { return Problem(kernel_, std::move(g), f_, grid_); }

private:
    Kernel kernel_;
    Weight g_;
    Nonlinearity f_;
    Grid grid_;
    H4Report h4_;
    double phi_g_ab_ = 0.0;
    std::vector<double> kmat_;
    std::vector<double> gvals_;
};

}  // namespace sturmcert
