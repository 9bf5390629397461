#pragma once

#include <vector>

#include "divopt/grid_fn.hpp"
#include "divopt/model.hpp"

namespace divopt {

struct OracleOptions {
    int max_iter = 100;
    double tol = -1.0;       // < 0: 1e-6 * (c+beta) * upper value bound
    double gamma_max = 1.0;  // 0 forces the all-bond policy
};

struct OracleSolution {
    GridFn v;                      // value samples; deriv holds upwind slopes
    std::vector<unsigned char> pay; // 1 where the payout branch is active
    std::vector<double> gamma;
    int iterations = 0;
    double residual = 0.0;                // final max of both HJB branches
    std::vector<double> sweep_residuals;  // residual after each accepted sweep
};

/// Low-order finite-difference policy iteration on a coarse grid (upwind
/// first derivative, central second derivative, trapezoid claim integral,
/// V' = 1 imposed on payout nodes). Deliberately shares no code with the
/// marching solvers; this is the cross-check, not the product.
OracleSolution policy_iteration_solve(const ModelParams& params, const ClaimDist& dist,
                                      const Grid& coarse, const OracleOptions& opts = {});

} // namespace divopt
