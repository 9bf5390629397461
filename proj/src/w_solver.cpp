#include "divopt/w_solver.hpp"

#include <algorithm>
#include <cmath>

#include "divopt/detail/march.hpp"

namespace divopt {

double gamma_tilde(double m_val, double wprime, double x, const ModelParams& params,
                   double gamma_floor) {
    if (!(wprime > 0.0)) raise(Errc::MonotonicityLost, "gamma_tilde needs W' > 0");
    if (!(x > 0.0)) raise(Errc::DomainError, "gamma_tilde needs x > 0");
    const double ratio = 2.0 * (m_val - params.p * wprime) / (params.r * x * wprime);
    return std::clamp(ratio, gamma_floor, 1.0);
}

double marched_second_derivative(double m_val, double wprime, double x, double gamma,
                                 const ModelParams& params) {
    const double sx = params.sigma * gamma * x;
    return 2.0 * (m_val - (params.p + params.r * gamma * x) * wprime) / (sx * sx);
}

TaylorSeed taylor_seed(const ModelParams& mp, const ClaimDist& dist, double x) {
    const double cb = mp.c + mp.beta;
    const double wp0 = cb / mp.p;
    const double wpp0 = (cb - mp.r) * cb / (mp.p * mp.p) - dist.density_at_zero() * mp.beta / mp.p;
    return {1.0 + wp0 * x + 0.5 * wpp0 * x * x, wp0 + wpp0 * x, wpp0};
}

namespace {

void validate_for_solver(const ModelParams& m, bool allow_zero_beta) {
    if (allow_zero_beta && m.beta == 0.0) {
        ModelParams relaxed = m;
        relaxed.beta = 1.0; // claim-free equation is well posed; skip the beta check only
        validate(relaxed);
        return;
    }
    validate(m);
}

} // namespace

WSolution solve_w(const ModelParams& mp, const ClaimDist& dist, const Grid& grid,
                  const WSolveOptions& opts) {
    validate_for_solver(mp, opts.allow_zero_beta);

    const int n = grid.n;
    const double h = grid.h;
    const double cb = mp.c + mp.beta;

    WSolution ws;
    ws.params = mp;
    ws.dist = dist;
    ws.w = GridFn(grid);
    ws.w2.assign((std::size_t)n + 1, 0.0);
    ws.gamma.assign((std::size_t)n + 1, 1.0);
    ws.m.assign((std::size_t)n + 1, 0.0);

    const ClaimConvolution cv(dist, grid);
    auto& W = ws.w.values;
    auto& Wp = ws.w.deriv;

    const int iseed = std::min(std::max(opts.seed_cells, 1), n / 2);
    ws.x_seed = grid.x(iseed);

    for (int i = 0; i <= iseed; ++i) {
        const TaylorSeed s = taylor_seed(mp, dist, grid.x(i));
        W[(std::size_t)i] = s.w;
        Wp[(std::size_t)i] = s.wp;
        ws.w2[(std::size_t)i] = s.wpp;
        ws.gamma[(std::size_t)i] = 1.0;
    }
    for (int i = 0; i <= iseed; ++i)
        ws.m[(std::size_t)i] = cb * W[(std::size_t)i] - mp.beta * cv.integrate(W, i);

    // Re-anchor the last seed node on the marched relations.
    {
        const int i = iseed;
        const double x = grid.x(i);
        const double g = gamma_tilde(ws.m[(std::size_t)i], Wp[(std::size_t)i], x, mp, opts.gamma_floor);
        ws.gamma[(std::size_t)i] = g;
        ws.w2[(std::size_t)i] = marched_second_derivative(ws.m[(std::size_t)i], Wp[(std::size_t)i], x, g, mp);
    }

    const double ew = cv.endpoint_weight();
    for (int i = iseed; i < n; ++i) {
        const double x = grid.x(i);
        const double hist = cv.hist_part(W, i + 1);

        // Endpoint prediction for M(x_{i+1}); W itself is a slow variable, so
        // a Taylor-2 estimate is ample for the conv endpoint and zeroth term.
        const double w_hat = W[(std::size_t)i] + h * Wp[(std::size_t)i] + 0.5 * h * h * ws.w2[(std::size_t)i];
        const double m_hat = cb * w_hat - mp.beta * (hist + ew * w_hat);

        const double m_lo = ws.m[(std::size_t)i];
        const auto m_at = [&](double xq) {
            const double t = (xq - x) / h;
            return m_lo + t * (m_hat - m_lo);
        };

        const int nsub = detail::substeps_for_cell(x, h, mp);
        detail::MarchState st{W[(std::size_t)i], Wp[(std::size_t)i]};
        st = detail::advance_cell(st, x, h, nsub, mp, opts.gamma_floor, m_at);

        const int j = i + 1;
        W[(std::size_t)j] = st.w;
        Wp[(std::size_t)j] = st.wp;
        ws.m[(std::size_t)j] = cb * st.w - mp.beta * (hist + ew * st.w);
        const double xj = grid.x(j);
        const double g = gamma_tilde(ws.m[(std::size_t)j], st.wp, xj, mp, opts.gamma_floor);
        ws.gamma[(std::size_t)j] = g;
        ws.w2[(std::size_t)j] = marched_second_derivative(ws.m[(std::size_t)j], st.wp, xj, g, mp);
    }

    double max_resid = 0.0;
    double wmax = 0.0;
    for (int i = 0; i <= n; ++i) {
        wmax = std::max(wmax, W[(std::size_t)i]);
        const double x = grid.x(i);
        const double g = ws.gamma[(std::size_t)i];
        const double sx = mp.sigma * g * x;
        const double resid = 0.5 * sx * sx * ws.w2[(std::size_t)i] +
                             (mp.p + mp.r * g * x) * Wp[(std::size_t)i] - ws.m[(std::size_t)i];
        max_resid = std::max(max_resid, std::abs(resid));
    }
    ws.max_resid = max_resid;
    const double tol = opts.tol_resid_factor * cb * wmax;
    if (max_resid > tol)
        raise(Errc::ResidualTooLarge, "marched solution residual exceeds tolerance");
    return ws;
}

ResidualReport hjb_residual(const WSolution& ws, int gamma_samples) {
    const ModelParams& mp = ws.params;
    const Grid& grid = ws.w.grid;
    const ClaimConvolution cv(ws.dist, grid);

    ResidualReport rep;
    rep.max_sup = -1e300;
    const int gs = std::max(gamma_samples, 2);

    for (int i = 0; i <= grid.n; ++i) {
        const double x = grid.x(i);
        const double wp = ws.w.deriv[(std::size_t)i];
        const double wpp = ws.w2[(std::size_t)i];
        const double m = (mp.c + mp.beta) * ws.w.values[(std::size_t)i] -
                         mp.beta * cv.integrate(ws.w.values, i);

        const auto op = [&](double g) {
            const double sx = mp.sigma * g * x;
            return 0.5 * sx * sx * wpp + (mp.p + mp.r * g * x) * wp - m;
        };

        double sup_sample = op(ws.gamma[(std::size_t)i]);
        for (int k = 0; k < gs; ++k)
            sup_sample = std::max(sup_sample, op((double)k / (double)(gs - 1)));

        // Analytic max of the parabola over [0,1]: endpoints plus the vertex
        // when the quadratic coefficient is negative.
        double sup_analytic = std::max(op(0.0), op(1.0));
        const double a2 = 0.5 * mp.sigma * mp.sigma * x * x * wpp;
        if (a2 < 0.0) {
            const double vtx = -mp.r * x * wp / (2.0 * a2);
            if (vtx > 0.0 && vtx < 1.0) sup_analytic = std::max(sup_analytic, op(vtx));
        }
        const double sup = std::max(sup_sample, sup_analytic);

        if (sup > rep.max_sup) {
            rep.max_sup = sup;
            rep.argmax_x = x;
            rep.argmax_gamma = ws.gamma[(std::size_t)i];
        }
        rep.max_abs_at_tilde = std::max(rep.max_abs_at_tilde, std::abs(op(ws.gamma[(std::size_t)i])));
        rep.max_sample_minus_analytic =
            std::max(rep.max_sample_minus_analytic, sup_sample - sup_analytic);
    }
    return rep;
}

} // namespace divopt
