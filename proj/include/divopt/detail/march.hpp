#pragma once

#include <algorithm>
#include <cmath>

#include "divopt/model.hpp"
#include "divopt/w_solver.hpp"

namespace divopt::detail {

struct MarchState {
    double w;
    double wp;
};

/// Heun predictor-corrector advance of (W, W') across one grid cell.
/// The equation is stiff where the ellipticity degenerates (the Jacobian
/// entry dW''/dW' ~ -2p/(sigma^2 x^2) blows up as x -> 0), so the cell is cut
/// into nsub stability-bounded substeps. M(x) is supplied by the caller,
/// linearly interpolated across the cell; gamma is re-optimized pointwise.
template <class MFn>
MarchState advance_cell(MarchState s, double x_from, double h, int nsub,
                        const ModelParams& mp, double gamma_floor, MFn&& m_at) {
    const double hs = h / (double)nsub;
    for (int q = 0; q < nsub; ++q) {
        const double x0 = x_from + hs * (double)q;
        const double x1 = x0 + hs;
        const double m0 = m_at(x0);
        const double g0 = gamma_tilde(m0, s.wp, x0, mp, gamma_floor);
        const double a0 = marched_second_derivative(m0, s.wp, x0, g0, mp);

        const double wp_mid = s.wp + hs * a0;
        if (!(wp_mid > 0.0))
            raise(Errc::MonotonicityLost, "derivative lost positivity during march");
        const double m1 = m_at(x1);
        const double g1 = gamma_tilde(m1, wp_mid, x1, mp, gamma_floor);
        const double a1 = marched_second_derivative(m1, wp_mid, x1, g1, mp);

        s.w += 0.5 * hs * (s.wp + wp_mid);
        s.wp += 0.5 * hs * (a0 + a1);
        if (!(s.wp > 0.0))
            raise(Errc::MonotonicityLost, "derivative lost positivity during march");
    }
    return s;
}

/// Substep count that keeps the fast mode of the linearized equation inside
/// the Heun stability region across the cell starting at x_from.
inline int substeps_for_cell(double x_from, double h, const ModelParams& mp) {
    const double x = std::max(x_from, h);
    const double lambda = 2.0 * (mp.p + mp.r * x) / (mp.sigma * mp.sigma * x * x);
    const int nsub = (int)std::ceil(h * lambda / 0.8);
    return std::clamp(nsub, 1, 200000);
}

} // namespace divopt::detail
