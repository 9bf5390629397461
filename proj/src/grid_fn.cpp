#include "divopt/grid_fn.hpp"

#include <algorithm>

namespace divopt {

namespace {

inline void check_domain(const Grid& g, double x) {
    if (!(x >= 0.0) || !(x <= g.x_max * (1.0 + 1e-12) + 1e-15))
        raise(Errc::DomainError, "evaluation point outside [0, x_max]");
}

} // namespace

double GridFn::eval(double x) const {
    check_domain(grid, x);
    const int i = grid.cell_of(x);
    const double h = grid.h;
    const double t = (x - grid.x(i)) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * values[i] + h * h10 * deriv[i] + h01 * values[i + 1] + h * h11 * deriv[i + 1];
}

double GridFn::eval_deriv(double x) const {
    check_domain(grid, x);
    const int i = grid.cell_of(x);
    const double h = grid.h;
    const double t = (x - grid.x(i)) / h;
    const double t2 = t * t;
    const double d00 = (6.0 * t2 - 6.0 * t) / h;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = (-6.0 * t2 + 6.0 * t) / h;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return d00 * values[i] + d10 * deriv[i] + d01 * values[i + 1] + d11 * deriv[i + 1];
}

double GridFn::trapezoid_consistency() const {
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double slope = (values[i + 1] - values[i]) / grid.h;
        const double avg = 0.5 * (deriv[i] + deriv[i + 1]);
        worst = std::max(worst, std::abs(slope - avg));
    }
    return worst;
}

} // namespace divopt
