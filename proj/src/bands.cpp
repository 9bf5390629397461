#include "divopt/bands.hpp"

#include <algorithm>
#include <cmath>

#include "divopt/certify.hpp"
#include "divopt/detail/march.hpp"
#include "divopt/detail/minimize.hpp"

namespace divopt {

namespace {

inline double hermite(double v0, double d0, double v1, double d1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + h * (t3 - 2.0 * t2 + t) * d0 +
           (-2.0 * t3 + 3.0 * t2) * v1 + h * (t3 - t2) * d1;
}

inline double hermite_deriv(double v0, double d0, double v1, double d1, double h, double t) {
    const double t2 = t * t;
    return (6.0 * t2 - 6.0 * t) / h * v0 + (3.0 * t2 - 4.0 * t + 1.0) * d0 +
           (-6.0 * t2 + 6.0 * t) / h * v1 + (3.0 * t2 - 2.0 * t) * d1;
}

} // namespace

double OffsetFn::eval(double xq) const {
    const int n = cells();
    if (xq < x0 - 1e-12 || xq > x_end() + 1e-9) raise(Errc::DomainError, "offset eval out of range");
    int k = (int)std::floor((xq - x0) / h);
    k = std::clamp(k, 0, n - 1);
    const double t = (xq - x(k)) / h;
    return hermite(values[(std::size_t)k], deriv[(std::size_t)k], values[(std::size_t)k + 1],
                   deriv[(std::size_t)k + 1], h, t);
}

double OffsetFn::eval_deriv(double xq) const {
    const int n = cells();
    if (xq < x0 - 1e-12 || xq > x_end() + 1e-9) raise(Errc::DomainError, "offset eval out of range");
    int k = (int)std::floor((xq - x0) / h);
    k = std::clamp(k, 0, n - 1);
    const double t = (xq - x(k)) / h;
    // W' interpolated from its own samples and W'' samples
    return hermite(deriv[(std::size_t)k], w2[(std::size_t)k], deriv[(std::size_t)k + 1],
                   w2[(std::size_t)k + 1], h, t);
}

LowerSolution LowerSolution::affine(double v0) {
    LowerSolution w;
    w.kind_ = Kind::Affine;
    w.v0_ = v0;
    return w;
}

LowerSolution LowerSolution::from_grid_fn(const GridFn& fn) {
    LowerSolution w;
    w.kind_ = Kind::Sampled;
    w.fn_ = &fn;
    return w;
}

LowerSolution LowerSolution::from_candidate(const CandidateValue& cand) {
    LowerSolution w;
    w.kind_ = Kind::Candidate;
    w.cand_ = &cand;
    return w;
}

double LowerSolution::eval(double x) const {
    switch (kind_) {
        case Kind::Affine: return x + v0_;
        case Kind::Sampled: return fn_->eval(x);
        case Kind::Candidate: return cand_->eval(x);
    }
    return 0.0;
}

double LowerSolution::eval_deriv(double x) const {
    switch (kind_) {
        case Kind::Affine: return 1.0;
        case Kind::Sampled: return fn_->eval_deriv(x);
        case Kind::Candidate: return cand_->eval_deriv(x);
    }
    return 0.0;
}

namespace {

// integral_{kh}^{kh + x0} w0(x - a) dF(a) at x = x0 + k h, via midpoint values
// of w0 against exact cdf increments; robust to density jumps anywhere.
double w0_claim_part(const LowerSolution& w0, const ClaimDist& dist, double x0, double x,
                     double h) {
    const double alpha_lo = x - x0;
    const double alpha_hi = std::min(x, dist.support_max() + h);
    if (alpha_lo >= alpha_hi) return 0.0;
    const double f_lo = dist.cdf(alpha_lo);
    const double f_hi = dist.cdf(alpha_hi);
    if (f_hi - f_lo <= 0.0) return 0.0;

    const int msub = std::max(4, (int)std::ceil((alpha_hi - alpha_lo) / (0.5 * h)));
    const double da = (alpha_hi - alpha_lo) / (double)msub;
    double sum = 0.0;
    double f_prev = f_lo;
    for (int j = 1; j <= msub; ++j) {
        const double a1 = alpha_lo + da * (double)j;
        const double f1 = (j == msub) ? f_hi : dist.cdf(a1);
        const double amid = a1 - 0.5 * da;
        sum += w0.eval(x - amid) * (f1 - f_prev);
        f_prev = f1;
    }
    return sum;
}

} // namespace

ContinuationSolution continuation_solve(const ModelParams& mp, const ClaimDist& dist,
                                        const LowerSolution& w0, double x0, double h,
                                        double x_end, const ContinuationOptions& opts) {
    if (!(h > 0.0) || !(x_end > x0)) raise(Errc::DomainError, "continuation needs x_end > x0");

    const double cb = mp.c + mp.beta;

    if (x0 == 0.0) {
        // Homogeneous case: U solves the same equation as W with
        // U(0) = w0(0), so U = w0(0) * W provided the boundary derivative
        // relation p U'(0) = (c+beta) U(0) holds.
        const double v0 = w0.eval(0.0);
        if (std::abs(mp.p * w0.eval_deriv(0.0) - cb * v0) > 1e-9 * std::max(1.0, cb * v0))
            raise(Errc::DomainError, "continuation from zero needs p w0'(0) = (c+beta) w0(0)");
        const Grid g = Grid::make(std::max(x_end, 17.0 * h), h);
        WSolveOptions wopts;
        wopts.gamma_floor = opts.gamma_floor;
        wopts.tol_resid_factor = opts.tol_resid_factor;
        const WSolution ws = solve_w(mp, dist, g, wopts);
        ContinuationSolution cs;
        cs.x0 = 0.0;
        cs.u.x0 = 0.0;
        cs.u.h = h;
        const auto ncopy = ws.w.values.size();
        cs.u.values.resize(ncopy);
        cs.u.deriv.resize(ncopy);
        cs.u.w2.resize(ncopy);
        for (std::size_t i = 0; i < ncopy; ++i) {
            cs.u.values[i] = v0 * ws.w.values[i];
            cs.u.deriv[i] = v0 * ws.w.deriv[i];
            cs.u.w2[i] = v0 * ws.w2[i];
        }
        cs.u.gamma = ws.gamma;
        cs.max_resid = v0 * ws.max_resid;
        return cs;
    }

    const int ncells = std::max((int)std::ceil((x_end - x0) / h - 1e-12), 1);

    ContinuationSolution cs;
    cs.x0 = x0;
    cs.u.x0 = x0;
    cs.u.h = h;
    auto& U = cs.u.values;
    auto& Up = cs.u.deriv;
    U.assign((std::size_t)ncells + 1, 0.0);
    Up.assign((std::size_t)ncells + 1, 0.0);
    cs.u.w2.assign((std::size_t)ncells + 1, 0.0);
    cs.u.gamma.assign((std::size_t)ncells + 1, 1.0);

    // The U-part of the claim integral at node k runs over [0, k h]; on that
    // range the integrand samples sit on the offset mesh, so the plain grid
    // convolution applies verbatim to the offset array.
    const ClaimConvolution cv(dist, Grid::make(std::max((double)ncells, 17.0) * h, h));
    const double ew = cv.endpoint_weight();

    std::vector<double> w0_part((std::size_t)ncells + 1, 0.0);
    std::vector<double> m((std::size_t)ncells + 1, 0.0);

    U[0] = w0.eval(x0);
    Up[0] = w0.eval_deriv(x0);
    if (!(U[0] > 0.0) || !(Up[0] > 0.0))
        raise(Errc::DomainError, "continuation seed must be positive and increasing");
    w0_part[0] = w0_claim_part(w0, dist, x0, x0, h);
    m[0] = cb * U[0] - mp.beta * w0_part[0];
    {
        const double g = gamma_tilde(m[0], Up[0], x0, mp, opts.gamma_floor);
        cs.u.gamma[0] = g;
        cs.u.w2[0] = marched_second_derivative(m[0], Up[0], x0, g, mp);
    }

    for (int k = 0; k < ncells; ++k) {
        const double x = cs.u.x(k);
        const double x1 = cs.u.x(k + 1);
        const double hist = cv.hist_part(U, k + 1);
        w0_part[(std::size_t)k + 1] = w0_claim_part(w0, dist, x0, x1, h);

        const double u_hat = U[(std::size_t)k] + h * Up[(std::size_t)k] + 0.5 * h * h * cs.u.w2[(std::size_t)k];
        const double m_hat =
            cb * u_hat - mp.beta * (hist + ew * u_hat + w0_part[(std::size_t)k + 1]);

        const double m_lo = m[(std::size_t)k];
        const auto m_at = [&](double xq) {
            const double t = (xq - x) / h;
            return m_lo + t * (m_hat - m_lo);
        };

        const int nsub = detail::substeps_for_cell(x, h, mp);
        detail::MarchState st{U[(std::size_t)k], Up[(std::size_t)k]};
        st = detail::advance_cell(st, x, h, nsub, mp, opts.gamma_floor, m_at);

        U[(std::size_t)k + 1] = st.w;
        Up[(std::size_t)k + 1] = st.wp;
        m[(std::size_t)k + 1] =
            cb * st.w - mp.beta * (hist + ew * st.w + w0_part[(std::size_t)k + 1]);
        const double g = gamma_tilde(m[(std::size_t)k + 1], st.wp, x1, mp, opts.gamma_floor);
        cs.u.gamma[(std::size_t)k + 1] = g;
        cs.u.w2[(std::size_t)k + 1] =
            marched_second_derivative(m[(std::size_t)k + 1], st.wp, x1, g, mp);
    }

    double max_resid = 0.0, umax = 0.0;
    for (int k = 0; k <= ncells; ++k) {
        umax = std::max(umax, U[(std::size_t)k]);
        const double x = cs.u.x(k);
        const double g = cs.u.gamma[(std::size_t)k];
        const double sx = mp.sigma * g * x;
        const double resid = 0.5 * sx * sx * cs.u.w2[(std::size_t)k] +
                             (mp.p + mp.r * g * x) * Up[(std::size_t)k] - m[(std::size_t)k];
        max_resid = std::max(max_resid, std::abs(resid));
    }
    cs.max_resid = max_resid;
    if (max_resid > opts.tol_resid_factor * cb * umax)
        raise(Errc::ResidualTooLarge, "continuation residual exceeds tolerance");
    return cs;
}

std::optional<double> find_touch(const ContinuationSolution& cs, double touch_tol) {
    const OffsetFn& u = cs.u;
    const int n = u.cells();
    const auto& d = u.deriv;

    // Strict downward crossing past the first cell.
    for (int k = 2; k <= n; ++k) {
        if (d[(std::size_t)k - 1] >= 1.0 && d[(std::size_t)k] < 1.0) {
            const auto f = [&](double x) { return u.eval_deriv(x) - 1.0; };
            return detail::bisect(f, u.x(k - 1), u.x(k), u.h * 1e-4);
        }
    }
    // Tangential touch: first local minimum of U' within touch_tol of one.
    for (int k = 1; k < n; ++k) {
        if (d[(std::size_t)k] <= d[(std::size_t)k - 1] && d[(std::size_t)k] <= d[(std::size_t)k + 1] &&
            d[(std::size_t)k] <= 1.0 + touch_tol) {
            auto [xm, fm] = detail::golden_min([&](double x) { return u.eval_deriv(x); },
                                               u.x(k - 1), u.x(k + 1), u.h / 100.0);
            if (fm > 1.0 + touch_tol) continue;
            return xm;
        }
    }
    return std::nullopt;
}

namespace {

double scan_g(const ModelParams& mp, const ClaimDist& dist, const LowerSolution& w0, double y,
              double h, double x_cut) {
    const ContinuationSolution cs = continuation_solve(mp, dist, w0, y, h, x_cut);
    double lo = 1e300;
    for (int k = 1; k <= cs.u.cells(); ++k) lo = std::min(lo, cs.u.deriv[(std::size_t)k]);
    return lo - 1.0;
}

CandidateValue assemble_two_band(const ModelParams& mp, const Grid& grid, double v0, double y1,
                                 double z1, const ContinuationSolution& cs) {
    CandidateValue cand;
    cand.v0 = v0;
    cand.a_star = z1;
    cand.bands.bands = {Band{0.0, 0.0}, Band{y1, z1}};
    cand.bands.check();

    const int mcells = std::clamp((int)std::ceil(z1 / grid.h - 1e-12), 16, grid.n);
    const Grid cg = Grid::make(grid.h * (double)mcells, grid.h);
    cand.core = GridFn(cg);
    cand.gamma.assign((std::size_t)cg.n + 1, 0.0);

    const double uz = cs.u.eval(z1);
    const double gz = cs.u.gamma.back();
    for (int i = 0; i <= cg.n; ++i) {
        const double x = cg.x(i);
        if (x <= y1) {
            cand.core.values[(std::size_t)i] = x + v0;
            cand.core.deriv[(std::size_t)i] = 1.0;
            cand.gamma[(std::size_t)i] = 0.0;
        } else if (x <= z1) {
            cand.core.values[(std::size_t)i] = cs.u.eval(x);
            cand.core.deriv[(std::size_t)i] = cs.u.eval_deriv(x);
            const int k = std::clamp((int)std::floor((x - cs.u.x0) / cs.u.h), 0, cs.u.cells() - 1);
            const double t = (x - cs.u.x(k)) / cs.u.h;
            cand.gamma[(std::size_t)i] =
                cs.u.gamma[(std::size_t)k] * (1.0 - t) + cs.u.gamma[(std::size_t)k + 1] * t;
        } else {
            cand.core.values[(std::size_t)i] = uz + (x - z1);
            cand.core.deriv[(std::size_t)i] = 1.0;
            cand.gamma[(std::size_t)i] = gz;
        }
    }
    (void)mp;
    return cand;
}

} // namespace

TwoBandResult two_band_search(const ModelParams& mp, const ClaimDist& dist, const Grid& grid,
                              const BandSearchOptions& opts) {
    validate(mp);
    const double h = grid.h;
    const double v0 = mp.p / (mp.c + mp.beta); // forced by Lambda(0) = 0
    const double x_cut = std::min(mp.p / (mp.c - mp.r) + 2.0 * h, grid.x_max);
    const double step = std::max(opts.scan_step_cells, 1.0) * h;
    const LowerSolution w0 = LowerSolution::affine(v0);

    const auto g_of = [&](double y) { return scan_g(mp, dist, w0, y, h, x_cut); };

    double y_lo = 0.0, g_lo = 0.0;
    double y_hi = -1.0;
    bool have_bracket = false;
    for (double y = step; y <= x_cut - step; y += step) {
        const double g = g_of(y);
        if (g <= 0.0) {
            if (y == step) {
                // Touch already present at the first probe: the first band is
                // non-degenerate and the best candidate is the pure barrier.
                TwoBandResult res;
                if (opts.precomputed_w) {
                    res.candidate = optimal_barrier(*opts.precomputed_w);
                } else {
                    const WSolution ws = solve_w(mp, dist, grid);
                    res.candidate = optimal_barrier(ws);
                }
                res.y1 = 0.0;
                res.z1 = res.candidate.a_star;
                return res;
            }
            y_hi = y;
            have_bracket = true;
            break;
        }
        y_lo = y;
        g_lo = g;
    }
    if (!have_bracket)
        raise(Errc::NoRoot, "no touch bracket below p/(c-r); more bands or a longer grid");

    while (y_hi - y_lo > std::max(h / 10.0, 1e-9)) {
        const double ym = 0.5 * (y_lo + y_hi);
        const double gm = g_of(ym);
        if (gm > 0.0) {
            y_lo = ym;
            g_lo = gm;
        } else {
            y_hi = ym;
        }
    }

    // Keep the bracket end where U' >= 1 everywhere so the glued candidate
    // retains derivative >= 1.
    const double y1 = y_lo;
    const ContinuationSolution cs = continuation_solve(mp, dist, w0, y1, h, x_cut);
    double touch_tol = std::max(2.0 * g_lo, 1e-6);
    auto z = find_touch(cs, touch_tol);
    if (!z) z = find_touch(cs, 4.0 * touch_tol);
    if (!z) raise(Errc::NoRoot, "touch vanished at the bisected boundary");

    TwoBandResult res;
    res.y1 = y1;
    res.z1 = *z;
    res.candidate = assemble_two_band(mp, grid, v0, y1, *z, cs);
    return res;
}

BandSearchResult band_search(const ModelParams& mp, const ClaimDist& dist, const Grid& grid,
                             int max_bands, const BandSearchOptions& opts) {
    if (max_bands < 1) raise(Errc::NoBandCandidate, "max_bands must be at least one");
    validate(mp);

    const WSolution* wsp = opts.precomputed_w;
    WSolution ws_local;
    if (!wsp) {
        ws_local = solve_w(mp, dist, grid);
        wsp = &ws_local;
    }

    CertifyOptions copts;
    copts.gamma_samples = opts.gamma_samples;
    copts.tol = opts.certify_tol;

    BandSearchResult best;
    best.candidate = optimal_barrier(*wsp);
    best.n_bands = 1;
    {
        const CertifyReport rep = certify(best.candidate, mp, dist, grid, copts);
        best.certified = rep.pass;
        best.certify_max_residual = rep.max_residual;
        if (rep.pass) return best;
    }

    CandidateValue prev = best.candidate;
    for (int k = 2; k <= max_bands; ++k) {
        CandidateValue cand;
        if (k == 2) {
            BandSearchOptions o2 = opts;
            o2.precomputed_w = wsp;
            const TwoBandResult tb = two_band_search(mp, dist, grid, o2);
            if (tb.y1 == 0.0) continue; // degenerated to the (failed) barrier
            cand = tb.candidate;
        } else {
            // Fix the lower bands and scan the next band bottom above the
            // current tail start with the same touch primitive.
            const double h = grid.h;
            const double x_cut = std::min(mp.p / (mp.c - mp.r) + 2.0 * h, grid.x_max);
            const double step = std::max(opts.scan_step_cells, 1.0) * h;
            const LowerSolution w0 = LowerSolution::from_candidate(prev);
            double y_lo = prev.a_star + step, g_lo = 0.0, y_hi = -1.0;
            bool have = false, have_lo = false;
            for (double y = prev.a_star + step; y <= x_cut - step; y += step) {
                const double g = scan_g(mp, dist, w0, y, h, x_cut);
                if (g <= 0.0) {
                    y_hi = y;
                    have = true;
                    break;
                }
                y_lo = y;
                g_lo = g;
                have_lo = true;
            }
            if (!have || !have_lo) continue;
            while (y_hi - y_lo > std::max(h / 10.0, 1e-9)) {
                const double ym = 0.5 * (y_lo + y_hi);
                const double gm = scan_g(mp, dist, w0, ym, h, x_cut);
                if (gm > 0.0) {
                    y_lo = ym;
                    g_lo = gm;
                } else {
                    y_hi = ym;
                }
            }
            const ContinuationSolution cs = continuation_solve(mp, dist, w0, y_lo, h, x_cut);
            const auto z = find_touch(cs, std::max(2.0 * g_lo, 1e-6));
            if (!z) continue;
            // Glue: previous candidate up to y_lo, continuation to z, affine tail.
            CandidateValue next;
            next.v0 = prev.v0;
            next.a_star = *z;
            next.bands = prev.bands;
            next.bands.bands.push_back(Band{y_lo, *z});
            next.bands.check();
            const int mcells = std::clamp((int)std::ceil(*z / h - 1e-12), 16, grid.n);
            const Grid cg = Grid::make(h * (double)mcells, h);
            next.core = GridFn(cg);
            next.gamma.assign((std::size_t)cg.n + 1, 0.0);
            for (int i = 0; i <= cg.n; ++i) {
                const double x = cg.x(i);
                if (x <= y_lo) {
                    next.core.values[(std::size_t)i] = prev.eval(x);
                    next.core.deriv[(std::size_t)i] = prev.eval_deriv(x);
                    next.gamma[(std::size_t)i] = prev.gamma_at(x);
                } else if (x <= *z) {
                    next.core.values[(std::size_t)i] = cs.u.eval(x);
                    next.core.deriv[(std::size_t)i] = cs.u.eval_deriv(x);
                } else {
                    next.core.values[(std::size_t)i] = cs.u.eval(*z) + (x - *z);
                    next.core.deriv[(std::size_t)i] = 1.0;
                }
            }
            cand = next;
        }

        const CertifyReport rep = certify(cand, mp, dist, grid, copts);
        best.candidate = cand;
        best.n_bands = k;
        best.certified = rep.pass;
        best.certify_max_residual = rep.max_residual;
        if (rep.pass) return best;
        prev = cand;
    }
    raise(Errc::NoBandCandidate, "no band candidate certified up to the requested count");
}

std::vector<double> lambda_profile(const CandidateValue& cand, const ModelParams& mp,
                                   const ClaimDist& dist, const Grid& grid) {
    const ClaimConvolution cv(dist, grid);
    std::vector<double> V((std::size_t)grid.n + 1);
    for (int i = 0; i <= grid.n; ++i) V[(std::size_t)i] = cand.eval(grid.x(i));
    std::vector<double> lam((std::size_t)grid.n + 1);
    for (int i = 0; i <= grid.n; ++i) {
        const double m = (mp.c + mp.beta) * V[(std::size_t)i] - mp.beta * cv.integrate(V, i);
        lam[(std::size_t)i] = (mp.p + mp.r * grid.x(i)) - m;
    }
    return lam;
}

double lambda_at(const CandidateValue& cand, const ModelParams& mp, const ClaimDist& dist,
                 const Grid& grid, double x) {
    if (x < 0.0 || x > grid.x_max) raise(Errc::DomainError, "lambda_at outside the grid");
    const std::vector<double> lam = lambda_profile(cand, mp, dist, grid);
    const int i = grid.cell_of(x);
    const double t = (x - grid.x(i)) / grid.h;
    return lam[(std::size_t)i] * (1.0 - t) + lam[(std::size_t)i + 1] * t;
}

std::vector<PointLabel> classify(const CandidateValue& cand, const ModelParams& mp,
                                 const ClaimDist& dist, const Grid& grid,
                                 const ClassifyTols& tols) {
    const std::vector<double> lam = lambda_profile(cand, mp, dist, grid);
    const double tol_l = (tols.tol_lambda > 0.0)
                             ? tols.tol_lambda
                             : 1e-3 * (mp.c + mp.beta) * cand.eval(cand.a_star);
    std::vector<PointLabel> out((std::size_t)grid.n + 1, PointLabel::C);
    for (int i = 0; i <= grid.n; ++i) {
        const double dv = cand.eval_deriv(grid.x(i));
        if (dv < 1.0 - tols.tol_d)
            raise(Errc::NotAValueFunction, "candidate derivative below one");
        const bool d_one = std::abs(dv - 1.0) <= tols.tol_d;
        if (d_one && std::abs(lam[(std::size_t)i]) <= tol_l)
            out[(std::size_t)i] = PointLabel::A;
        else if (d_one && lam[(std::size_t)i] < -tol_l)
            out[(std::size_t)i] = PointLabel::B;
    }
    return out;
}

} // namespace divopt
