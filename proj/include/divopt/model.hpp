#pragma once

#include <cstdint>
#include <vector>

#include "divopt/errors.hpp"

namespace divopt {

/// Model of the surplus process: premium rate p, claim intensity beta,
/// discount rate c, risky-asset drift r and volatility sigma. The theory
/// requires c > r > 0; outside that regime the value function is infinite
/// and every solver refuses to run.
struct ModelParams {
    double p = 0.0;     // premium rate (money / time)
    double beta = 0.0;  // claim arrival intensity (1 / time)
    double c = 0.0;     // discount rate (1 / time)
    double r = 0.0;     // risky-asset drift (1 / time)
    double sigma = 0.0; // risky-asset volatility (1 / sqrt(time))
};

/// Throws Error{DiscountBelowDrift} when c <= r, Error{NonPositiveParam}
/// for any violated positivity constraint.
void validate(const ModelParams& params);

/// Claim-size law with a bounded density. F(0) = 0, finite mean, no atoms.
///
/// Supported kinds:
///  - exponential(rate), density rate*exp(-rate*x)
///  - piecewise_uniform(lo, hi), uniform on (lo, hi]
///  - tabulated(step, samples): density sampled on a uniform grid starting
///    at 0, linearly interpolated between samples and renormalized to
///    integrate to one at construction time.
class ClaimDist {
public:
    enum class Kind { Exponential, PiecewiseUniform, Tabulated };

    static ClaimDist exponential(double rate);
    static ClaimDist piecewise_uniform(double lo, double hi);
    static ClaimDist tabulated(double step, std::vector<double> density_samples);

    Kind kind() const { return kind_; }

    double cdf(double x) const;
    double density(double x) const;
    double mean() const { return mean_; }
    /// Inverse-CDF sampling; u must lie in (0, 1).
    double sample(double u) const;

    /// Supremum of the density (the boundedness assumption made checkable).
    double density_bound() const { return density_bound_; }
    /// Quadrature truncation point: smallest x with cdf(x) > 1 - 1e-12
    /// (exact upper endpoint for compactly supported laws).
    double support_max() const { return support_max_; }
    /// density(0+), the F'(0) entering the second-order expansion at zero.
    double density_at_zero() const { return density(0.0); }
    /// Abscissas where the density jumps (trapezoid tables average the
    /// one-sided limits there to keep second-order quadrature).
    const std::vector<double>& jump_points() const { return jumps_; }

private:
    ClaimDist() = default;

    Kind kind_ = Kind::Exponential;
    double rate_ = 1.0;              // exponential
    double lo_ = 0.0, hi_ = 1.0;     // piecewise uniform
    double step_ = 0.0;              // tabulated
    std::vector<double> dens_;       // tabulated density samples (normalized)
    std::vector<double> cum_;        // tabulated cumulative at sample points

    double mean_ = 0.0;
    double density_bound_ = 0.0;
    double support_max_ = 0.0;
    std::vector<double> jumps_;
};

} // namespace divopt
