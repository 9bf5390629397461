#pragma once

#include <span>
#include <vector>

#include "divopt/grid_fn.hpp"
#include "divopt/model.hpp"

namespace divopt {

/// Trapezoidal claim convolution on a Grid:
///
///   integrate(f, i) ~ integral_0^{x_i} f(x_i - a) dF(a)
///
/// The density is tabulated once per (distribution, grid); nodes that land
/// exactly on a density jump store the mean of the one-sided limits, which
/// keeps the trapezoid rule second order there. Terms beyond the
/// distribution's effective support are dropped (density is zero there up to
/// the 1e-12 cdf tail).
class ClaimConvolution {
public:
    ClaimConvolution(const ClaimDist& dist, const Grid& grid);

    const Grid& grid() const { return grid_; }

    /// Trapezoid quadrature of f(x_i - a) density(a) over [0, x_i] using
    /// f[0..i]. O(min(i, support/h)) per call.
    double integrate(std::span<const double> f, int i) const;

    /// integrate(f, i) split as hist_part(f, i) + endpoint_weight() * f[i];
    /// hist_part touches f[0..i-1] only, so a marching solver can price a
    /// trial endpoint value without redoing the sum.
    double hist_part(std::span<const double> f, int i) const;
    double endpoint_weight() const { return 0.5 * grid_.h * dens_[0]; }

    const std::vector<double>& density_table() const { return dens_; }
    int support_cells() const { return jmax_; }

private:
    Grid grid_;
    std::vector<double> dens_; // density at nodes 0..jmax
    int jmax_ = 0;             // last node with possibly nonzero density
};

/// M(f)(x_i) = (c + beta) f(x_i) - beta * integral_0^{x_i} f(x_i - a) dF(a).
double m_operator(const ClaimConvolution& cv, std::span<const double> f,
                  const ModelParams& params, int i);

/// Continuation form: f is only valid from node i0 up, w0 covers [0, x_{i0}]:
/// the claim integral reads the merged function (w0 below x_{i0}, f above).
double m_operator(const ClaimConvolution& cv, std::span<const double> f,
                  std::span<const double> w0, int i0, const ModelParams& params, int i);

} // namespace divopt
