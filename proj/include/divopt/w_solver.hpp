#pragma once

#include <vector>

#include "divopt/conv.hpp"
#include "divopt/grid_fn.hpp"
#include "divopt/model.hpp"

namespace divopt {

/// Optimal investment fraction at a point, given M(W)(x) and W'(x):
///
///   gamma = min{ 1, 2 (M - p W') / (r x W') }
///
/// clamped below at gamma_floor: the vertex of the gamma-parabola is provably
/// positive for the constructed solution, so a clamped value turns an
/// impending division blow-up into a detectable MonotonicityLost failure
/// a few steps later instead of a NaN.
double gamma_tilde(double m_val, double wprime, double x, const ModelParams& params,
                   double gamma_floor = 1e-8);

/// W''(x) solved from L_gamma(W)(x) = 0 at a point with gamma > 0, x > 0.
double marched_second_derivative(double m_val, double wprime, double x, double gamma,
                                 const ModelParams& params);

struct TaylorSeed {
    double w;   // W(x)
    double wp;  // W'(x)
    double wpp; // W''(x)
};

/// Second-order expansion at zero: W(0) = 1, W'(0+) = (c+beta)/p,
/// W''(0+) = (c+beta-r)(c+beta)/p^2 - F'(0) beta / p. Valid on the seed
/// region where the investment fraction is pinned at one.
TaylorSeed taylor_seed(const ModelParams& params, const ClaimDist& dist, double x);

struct WSolveOptions {
    int seed_cells = 10;              // Taylor seed covers [0, seed_cells * h]
    double gamma_floor = 1e-8;
    double tol_resid_factor = 1e-4;   // residual tolerance = factor * (c+beta) * max W
    bool allow_zero_beta = true;      // the claim-free equation is legitimate input
};

/// Increasing classical solution of sup_gamma L_gamma(W) = 0 with W(0) = 1,
/// marched cell by cell; near zero the ellipticity degenerates and cells are
/// integrated with stability-bounded substeps.
struct WSolution {
    GridFn w;                   // W with W' in deriv
    std::vector<double> w2;     // W'' samples
    std::vector<double> gamma;  // optimal investment fraction samples
    std::vector<double> m;      // M(W) samples
    ModelParams params;
    ClaimDist dist;
    double x_seed = 0.0;
    double max_resid = 0.0;     // max |L_{gamma}(W)| over nodes
};

WSolution solve_w(const ModelParams& params, const ClaimDist& dist, const Grid& grid,
                  const WSolveOptions& opts = {});

struct ResidualReport {
    double max_sup = 0.0;          // max over nodes and gamma samples of L_gamma(W)
    double max_abs_at_tilde = 0.0; // max over nodes of |L_{gamma_tilde}(W)|
    double argmax_x = 0.0;
    double argmax_gamma = 0.0;
    double max_sample_minus_analytic = 0.0; // gamma-sample sup vs vertex/endpoint sup
};

/// Sweeps a uniform gamma sample (plus gamma_tilde and the analytic parabola
/// vertex) over every node and reports the worst operator values.
ResidualReport hjb_residual(const WSolution& ws, int gamma_samples);

} // namespace divopt
