#pragma once

#include "divopt/candidate.hpp"
#include "divopt/w_solver.hpp"

namespace divopt {

struct BarrierLevel {
    double w1 = 0.0;     // min of W'
    double x_star = 0.0; // smallest minimizer
};

/// Grid argmin of W', refined by golden-section search on the Hermite
/// interpolant of W' in the bracketing cells. Fails with GridTooShort when
/// the minimum sits at the right edge (the grid must extend past the point
/// where payouts provably start, p/(c-r)).
BarrierLevel argmin_wprime(const WSolution& ws);

/// Value function of the limit barrier strategy at level y:
/// W(x)/W'(y) below y, affine slope one above.
CandidateValue barrier_value(const WSolution& ws, double y);

/// Barrier at the argmin of W'; the scaling makes this the pointwise best
/// barrier value function, which is asserted against a probe set of levels.
CandidateValue optimal_barrier(const WSolution& ws);

} // namespace divopt
