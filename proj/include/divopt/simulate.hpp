#pragma once

#include <cstdint>

#include "divopt/candidate.hpp"
#include "divopt/model.hpp"

namespace divopt {

/// Stationary band strategy for the controlled jump-diffusion: continue (and
/// invest gamma(x)) inside a band, reflect at the band top, pay down to the
/// top below when the surplus lands between bands, and, when the lowest band
/// top is zero, pay the premium stream at zero surplus until the next claim
/// ruins the company.
struct StrategySpec {
    BandStructure bands;
    GridFn gamma;        // investment fraction by current surplus, values in [0,1]
    bool zero_absorbing = false;

    void check() const;
};

StrategySpec strategy_from_candidate(const CandidateValue& cand);

struct PathResult {
    double discounted_dividends = 0.0;
    bool ruined = false;
};

/// One path: Euler-Maruyama between exactly sampled claim epochs, reflection
/// at the band top via the Brownian-bridge running maximum of the free step
/// (removes the O(sqrt(dt)) payout bias of plain truncation). Deterministic
/// given (master_seed, path_index).
PathResult simulate_path(const StrategySpec& spec, double x0, const ModelParams& params,
                         const ClaimDist& dist, double dt, double t_max,
                         std::uint64_t master_seed, std::uint64_t path_index = 0);

struct SimConfig {
    long n_paths = 10000;
    double dt = 1e-3;
    double t_max = 0.0;   // <= 0: derived from the truncation target
    std::uint64_t seed = 1;
    int threads = 0;      // 0: hardware concurrency
    double truncation_target = 1e-3; // pick t_max so the tail bound <= target * V-scale
};

struct SimReport {
    double estimate = 0.0;
    double stderr_est = 0.0;
    double truncation_bound = 0.0;
    double ruin_fraction = 0.0;
    long n_paths = 0;
    double t_max = 0.0;
};

/// Mean discounted dividends over independent paths; per-path seeds derive
/// from (seed, path index) so the result is bit-identical for any thread
/// count or execution order.
SimReport estimate_value(const StrategySpec& spec, double x0, const ModelParams& params,
                         const ClaimDist& dist, const SimConfig& cfg);

} // namespace divopt
