#pragma once

#include <vector>

#include "divopt/candidate.hpp"
#include "divopt/model.hpp"

namespace divopt {

struct Witness {
    double x = 0.0;
    double gamma = 0.0;
    double residual = 0.0;
    bool at_glue = false; // within one cell of a band boundary
};

struct CertifyReport {
    bool pass = false;
    double tol = 0.0;
    double max_residual = 0.0;     // max over nodes of max{1 - V', sup_gamma L_gamma(V)}
    double max_pos_operator = 0.0; // max over nodes of (sup_gamma L_gamma(V))+
    std::vector<Witness> witnesses;
    double max_sample_minus_analytic = 0.0;
};

struct CertifyOptions {
    int gamma_samples = 41;
    double tol = -1.0;           // < 0: use 1e-3 * (c+beta) * V(a*)
    std::size_t max_witnesses = 64;
};

/// Numerical viscosity-supersolution certificate: the candidate passes when
/// max{1 - V'(x), sup_gamma L_gamma(V)(x)} <= tol on every grid node, with
/// the second derivative estimated by central differences of the stored V'
/// (one-sided from the continuation side next to band boundaries, where V''
/// may jump). Failures return each offending (x, gamma, residual), sorted by
/// residual.
CertifyReport certify(const CandidateValue& cand, const ModelParams& params,
                      const ClaimDist& dist, const Grid& grid, const CertifyOptions& opts = {});

/// Certificate for externally supplied samples (the CLI path: V and V' read
/// back from a CSV). glue_points marks where one-sided differences are used.
CertifyReport certify_samples(const std::vector<double>& values, const std::vector<double>& deriv,
                              const std::vector<double>& glue_points, double a_star,
                              const ModelParams& params, const ClaimDist& dist, const Grid& grid,
                              const CertifyOptions& opts = {});

} // namespace divopt
