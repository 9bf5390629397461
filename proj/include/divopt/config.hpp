#pragma once

#include <string>

#include "divopt/grid_fn.hpp"
#include "divopt/model.hpp"
#include "divopt/simulate.hpp"

namespace divopt {

struct Tolerances {
    double resid_factor = 1e-4; // marched-residual acceptance factor
    double certify = -1.0;      // < 0: 1e-3 * (c+beta) * V(a*)
    double lambda = -1.0;       // < 0: 1e-3 * (c+beta) * V(a*)
    double deriv = 1e-6;
};

struct RunConfig {
    ModelParams params;
    ClaimDist claim = ClaimDist::exponential(1.0);
    Grid grid;          // defaults: x_max = 1.5 p/(c-r), h = 1e-3
    Tolerances tol;
    SimConfig sim;
};

/// Parses the JSON config documented in the README. Raises ConfigError with
/// a line/key diagnostic for malformed input.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

} // namespace divopt
