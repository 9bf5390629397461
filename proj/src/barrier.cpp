#include "divopt/barrier.hpp"

#include <algorithm>
#include <cmath>

#include "divopt/detail/minimize.hpp"
#include "divopt/kernels.hpp"

namespace divopt {

namespace {

// Hermite interpolant of W' built from (W', W'') samples.
GridFn deriv_fn(const WSolution& ws) {
    GridFn d;
    d.grid = ws.w.grid;
    d.values = ws.w.deriv;
    d.deriv = ws.w2;
    return d;
}

} // namespace

BarrierLevel argmin_wprime(const WSolution& ws) {
    const Grid& g = ws.w.grid;
    const auto& wp = ws.w.deriv;

    int i0 = 0;
    for (int i = 1; i <= g.n; ++i)
        if (wp[(std::size_t)i] < wp[(std::size_t)i0]) i0 = i;

    if (i0 >= g.n)
        raise(Errc::GridTooShort, "min of W' at x_max; extend the grid past p/(c-r)");

    if (i0 == 0 && wp[1] >= wp[0]) return {wp[0], 0.0};

    const GridFn d = deriv_fn(ws);
    const double a = g.x(std::max(i0 - 1, 0));
    const double b = g.x(std::min(i0 + 1, g.n));
    auto [xm, fm] = detail::golden_min([&](double x) { return d.eval(x); }, a, b, g.h / 100.0);
    if (fm >= wp[(std::size_t)i0]) { // interpolant no better than the node
        xm = g.x(i0);
        fm = wp[(std::size_t)i0];
    }
    return {fm, xm};
}

CandidateValue barrier_value(const WSolution& ws, double y) {
    const Grid& g = ws.w.grid;
    if (!(y >= 0.0) || y > g.x_max) raise(Errc::DomainError, "barrier level outside the grid");

    const GridFn d = deriv_fn(ws);
    const double wpy = (y == 0.0) ? ws.w.deriv[0] : d.eval(y);
    const double wy = (y == 0.0) ? 1.0 : ws.w.eval(y);

    CandidateValue cand;
    cand.a_star = y;
    cand.v0 = 1.0 / wpy;
    cand.bands.bands = {Band{0.0, y}};

    const int mcells = std::clamp((int)std::ceil(y / g.h - 1e-12), 16, g.n);
    Grid cg = Grid::make(g.h * (double)mcells, g.h);
    cand.core = GridFn(cg);
    cand.gamma.assign((std::size_t)cg.n + 1, 0.0);

    const double inv = 1.0 / wpy;
    for (int i = 0; i <= cg.n; ++i) {
        const double x = cg.x(i);
        if (x <= y) {
            cand.core.values[(std::size_t)i] = ws.w.values[(std::size_t)i] * inv;
            cand.core.deriv[(std::size_t)i] = ws.w.deriv[(std::size_t)i] * inv;
            cand.gamma[(std::size_t)i] = ws.gamma[(std::size_t)i];
        } else {
            cand.core.values[(std::size_t)i] = wy * inv + (x - y);
            cand.core.deriv[(std::size_t)i] = 1.0;
            cand.gamma[(std::size_t)i] = ws.gamma[(std::size_t)g.cell_of(y)];
        }
    }
    cand.bands.check();
    return cand;
}

CandidateValue optimal_barrier(const WSolution& ws) {
    const BarrierLevel lvl = argmin_wprime(ws);
    CandidateValue cand = barrier_value(ws, lvl.x_star);

    // w1 minimizes W', so this candidate dominates every other barrier level
    // pointwise; spot-check a probe set against roundoff.
    const Grid& g = ws.w.grid;
    const double probes_x[] = {0.0, 0.5 * lvl.x_star, lvl.x_star,
                               std::min(lvl.x_star + 1.0, g.x_max)};
    for (int k = 0; k < 50; ++k) {
        const double y = g.x_max * 0.9 * (double)(k + 1) / 50.0;
        const CandidateValue other = barrier_value(ws, y);
        for (double x : probes_x)
            if (cand.eval(x) < other.eval(x) - 1e-9)
                raise(Errc::ResidualTooLarge, "barrier at argmin W' is not the max over levels");
    }
    return cand;
}

} // namespace divopt
