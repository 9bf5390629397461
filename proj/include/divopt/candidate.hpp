#pragma once

#include <vector>

#include "divopt/grid_fn.hpp"

namespace divopt {

/// One continuation component [bottom, top]. The top always sits in the
/// boundary set where the candidate's derivative is one and Lambda vanishes;
/// surplus above the top (until the next band's bottom) is paid out down to
/// the top. A degenerate band {0, 0} encodes the absorbing state at zero:
/// at zero surplus the premium stream is paid as dividends until the next
/// claim, which means ruin.
struct Band {
    double bottom = 0.0;
    double top = 0.0;
};

struct BandStructure {
    std::vector<Band> bands; // ordered; pure barrier at y is the single band {0, y}

    double a_star() const { return bands.empty() ? 0.0 : bands.back().top; }
    bool zero_absorbing() const { return !bands.empty() && bands.front().top == 0.0; }
    void check() const;
};

/// Piecewise candidate value function: a grid part on [0, ~a*] glued to an
/// affine slope-one tail, plus the band structure of the stationary strategy
/// it came from and the investment profile on the grid part.
struct CandidateValue {
    GridFn core;               // covers [0, core.grid.x_max], x_max >= a_star
    double a_star = 0.0;       // affine tail start
    double v0 = 0.0;           // value at zero
    BandStructure bands;
    std::vector<double> gamma; // investment fraction at core nodes

    double eval(double x) const {
        if (x <= core.grid.x_max) return core.eval(x);
        return core.values.back() + (x - core.grid.x_max);
    }
    double eval_deriv(double x) const {
        if (x <= core.grid.x_max) return core.eval_deriv(x);
        return 1.0;
    }
    double gamma_at(double x) const;
};

} // namespace divopt
