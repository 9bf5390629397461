#pragma once

#include <optional>
#include <vector>

#include "divopt/barrier.hpp"
#include "divopt/candidate.hpp"
#include "divopt/w_solver.hpp"

namespace divopt {

/// Function samples on the offset mesh {x0 + k h}; continuations live here
/// because band boundaries land between nodes of the main grid.
struct OffsetFn {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> values;
    std::vector<double> deriv;
    std::vector<double> w2;
    std::vector<double> gamma;

    int cells() const { return (int)values.size() - 1; }
    double x(int k) const { return x0 + h * (double)k; }
    double x_end() const { return x(cells()); }
    double eval(double x) const;
    double eval_deriv(double x) const;
};

/// The function below the continuation start: either the affine slope-one
/// profile x + v0 of a payout region, or an already-built candidate truncated
/// at x0 (affine beyond its own tail start).
struct LowerSolution {
    static LowerSolution affine(double v0);
    static LowerSolution from_grid_fn(const GridFn& fn);
    static LowerSolution from_candidate(const CandidateValue& cand);

    double eval(double x) const;
    double eval_deriv(double x) const;

private:
    enum class Kind { Affine, Sampled, Candidate } kind_ = Kind::Affine;
    double v0_ = 0.0;
    const GridFn* fn_ = nullptr;
    const CandidateValue* cand_ = nullptr;
};

struct ContinuationSolution {
    OffsetFn u;
    double x0 = 0.0;
    double max_resid = 0.0;
};

struct ContinuationOptions {
    double gamma_floor = 1e-8;
    double tol_resid_factor = 1e-4;
};

/// Unique C^2 solution of the continuation equation above x0, seeded by
/// U(x0) = w0(x0), U'(x0) = w0'(x0); the claim integral reads U above x0 and
/// w0 below. Marches to x_end on the offset mesh with step h.
///
/// x0 = 0 with an affine w0 is the homogeneous case U = v0 * W and is
/// delegated to solve_w (the v0-scaling requires p w0'(0) = (c+beta) w0(0)).
ContinuationSolution continuation_solve(const ModelParams& params, const ClaimDist& dist,
                                        const LowerSolution& w0, double x0, double h,
                                        double x_end, const ContinuationOptions& opts = {});

/// First point above x0 + h where U' returns to one: a strict downward
/// crossing is bisected on the interpolant; failing that, a local minimum of
/// U' within touch_tol of one counts as a tangential touch. Empty when U'
/// stays above 1 + touch_tol.
std::optional<double> find_touch(const ContinuationSolution& cs, double touch_tol = 1e-3);

struct TwoBandResult {
    double y1 = 0.0;
    double z1 = 0.0;
    CandidateValue candidate;
};

struct BandSearchOptions {
    int gamma_samples = 41;
    double certify_tol = -1.0; // < 0: use 1e-3 * (c+beta) * V(a*)
    double scan_step_cells = 10.0;
    const WSolution* precomputed_w = nullptr;
};

/// Smallest y whose continuation from the payout profile x + p/(c+beta)
/// touches slope one again, located by a coarse scan of
/// g(y) = min U_y' - 1 and bisection; y1 = 0 (with the optimal barrier as
/// candidate) when the very first probe already touches.
TwoBandResult two_band_search(const ModelParams& params, const ClaimDist& dist,
                              const Grid& grid, const BandSearchOptions& opts = {});

struct BandSearchResult {
    CandidateValue candidate;
    int n_bands = 0;
    bool certified = false;
    double certify_max_residual = 0.0;
};

/// Tries the best 1-band (barrier), then 2-band, ..., up to max_bands
/// candidates, returning the first one that certifies as a supersolution.
BandSearchResult band_search(const ModelParams& params, const ClaimDist& dist, const Grid& grid,
                             int max_bands, const BandSearchOptions& opts = {});

/// Lambda(x) = (p + r x) - M(V)(x) on every grid node, with V extended
/// affinely past its tail start.
std::vector<double> lambda_profile(const CandidateValue& cand, const ModelParams& params,
                                   const ClaimDist& dist, const Grid& grid);
double lambda_at(const CandidateValue& cand, const ModelParams& params, const ClaimDist& dist,
                 const Grid& grid, double x);

enum class PointLabel : char { A = 'A', B = 'B', C = 'C' };

struct ClassifyTols {
    double tol_d = 1e-6;
    double tol_lambda = -1.0; // < 0: use 1e-3 * (c+beta) * V(a*)
};

/// Per-node labels: A when V' = 1 and Lambda = 0 (band boundaries), B when
/// V' = 1 and Lambda < 0 (payout region), C otherwise (continuation region).
std::vector<PointLabel> classify(const CandidateValue& cand, const ModelParams& params,
                                 const ClaimDist& dist, const Grid& grid,
                                 const ClassifyTols& tols = {});

} // namespace divopt
