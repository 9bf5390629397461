#include "divopt/certify.hpp"

#include <algorithm>
#include <cmath>

#include "divopt/conv.hpp"

namespace divopt {

namespace {

double default_tol(const CandidateValue& cand, const ModelParams& mp) {
    return 1e-3 * (mp.c + mp.beta) * cand.eval(cand.a_star);
}

} // namespace

CertifyReport certify_samples(const std::vector<double>& V, const std::vector<double>& Vp,
                              const std::vector<double>& glue_points, double a_star,
                              const ModelParams& mp, const ClaimDist& dist, const Grid& grid,
                              const CertifyOptions& opts) {
    const int n = grid.n;
    const double h = grid.h;
    const ClaimConvolution cv(dist, grid);

    // Second derivative from central differences of the stored first
    // derivative; pure one-sided next to a glue point so the estimate never
    // straddles a kink of V'. The affine tail has V'' = 0 identically.
    std::vector<double> Vpp((std::size_t)n + 1, 0.0);
    const auto near_glue = [&](double x) {
        for (double g : glue_points)
            if (std::abs(x - g) <= h) return true;
        return false;
    };
    for (int i = 0; i <= n; ++i) {
        const double x = grid.x(i);
        if (x > a_star + h) {
            Vpp[(std::size_t)i] = 0.0;
            continue;
        }
        const int im = std::max(i - 1, 0);
        const int ip = std::min(i + 1, n);
        if (near_glue(x)) {
            // One-sided difference that stays on the node's own piece; a node
            // sitting exactly on the kink takes the continuation side (band
            // bottoms have it above, band tops below).
            double g = glue_points.empty() ? x : glue_points[0];
            for (double gp : glue_points)
                if (std::abs(x - gp) < std::abs(x - g)) g = gp;
            bool use_right;
            if (x < g - 1e-12)
                use_right = false;
            else if (x > g + 1e-12)
                use_right = true;
            else
                use_right = g < a_star - h;
            if (use_right && i + 1 <= n)
                Vpp[(std::size_t)i] = (Vp[(std::size_t)i + 1] - Vp[(std::size_t)i]) / h;
            else if (i >= 1)
                Vpp[(std::size_t)i] = (Vp[(std::size_t)i] - Vp[(std::size_t)i - 1]) / h;
            else
                Vpp[(std::size_t)i] = (Vp[1] - Vp[0]) / h;
        } else {
            Vpp[(std::size_t)i] = (Vp[(std::size_t)ip] - Vp[(std::size_t)im]) / ((double)(ip - im) * h);
        }
    }

    CertifyReport rep;
    rep.tol = (opts.tol > 0.0) ? opts.tol : 1e-3 * (mp.c + mp.beta) * V[(std::size_t)std::min(grid.cell_of(a_star) + 1, n)];
    const int gs = std::max(opts.gamma_samples, 2);

    for (int i = 0; i <= n; ++i) {
        const double x = grid.x(i);
        const double vp = Vp[(std::size_t)i];
        const double vpp = Vpp[(std::size_t)i];
        const double m = (mp.c + mp.beta) * V[(std::size_t)i] - mp.beta * cv.integrate(V, i);

        const auto op = [&](double g) {
            const double sx = mp.sigma * g * x;
            return 0.5 * sx * sx * vpp + (mp.p + mp.r * g * x) * vp - m;
        };

        double sup_sample = op(0.0);
        double garg = 0.0;
        for (int k = 1; k < gs; ++k) {
            const double g = (double)k / (double)(gs - 1);
            const double v = op(g);
            if (v > sup_sample) {
                sup_sample = v;
                garg = g;
            }
        }
        double sup = sup_sample;
        const double a2 = 0.5 * mp.sigma * mp.sigma * x * x * vpp;
        double sup_analytic = std::max(op(0.0), op(1.0));
        if (a2 < 0.0) {
            const double vtx = -mp.r * x * vp / (2.0 * a2);
            if (vtx > 0.0 && vtx < 1.0) {
                const double v = op(vtx);
                sup_analytic = std::max(sup_analytic, v);
                if (v > sup) {
                    sup = v;
                    garg = vtx;
                }
            }
        }
        rep.max_sample_minus_analytic =
            std::max(rep.max_sample_minus_analytic, sup_sample - sup_analytic);

        const double resid = std::max(1.0 - vp, sup);
        rep.max_residual = std::max(rep.max_residual, resid);
        rep.max_pos_operator = std::max(rep.max_pos_operator, sup);
        if (resid > rep.tol)
            rep.witnesses.push_back({x, (1.0 - vp >= sup) ? -1.0 : garg, resid, near_glue(x)});
    }

    std::sort(rep.witnesses.begin(), rep.witnesses.end(),
              [](const Witness& a, const Witness& b) { return a.residual > b.residual; });
    if (rep.witnesses.size() > opts.max_witnesses) rep.witnesses.resize(opts.max_witnesses);
    rep.pass = rep.witnesses.empty();
    return rep;
}

CertifyReport certify(const CandidateValue& cand, const ModelParams& mp, const ClaimDist& dist,
                      const Grid& grid, const CertifyOptions& opts) {
    std::vector<double> V((std::size_t)grid.n + 1), Vp((std::size_t)grid.n + 1);
    for (int i = 0; i <= grid.n; ++i) {
        const double x = grid.x(i);
        V[(std::size_t)i] = cand.eval(x);
        Vp[(std::size_t)i] = cand.eval_deriv(x);
    }
    std::vector<double> glue;
    for (const Band& b : cand.bands.bands) {
        if (b.bottom > 0.0) glue.push_back(b.bottom);
        if (b.top > 0.0) glue.push_back(b.top);
    }
    CertifyOptions o = opts;
    if (o.tol <= 0.0) o.tol = default_tol(cand, mp);
    return certify_samples(V, Vp, glue, cand.a_star, mp, dist, grid, o);
}

} // namespace divopt
