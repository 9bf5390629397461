#include "divopt/policy_iteration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace divopt {

namespace {

struct Policy {
    std::vector<unsigned char> pay;
    std::vector<double> gamma;

    bool operator==(const Policy& o) const { return pay == o.pay && gamma == o.gamma; }
};

} // namespace

OracleSolution policy_iteration_solve(const ModelParams& mp, const ClaimDist& dist,
                                      const Grid& grid, const OracleOptions& opts) {
    if (grid.n > 2000) raise(Errc::ConfigError, "oracle grid capped at 2000 cells");
    {
        ModelParams check = mp;
        if (check.beta == 0.0) check.beta = 1.0; // claim-free runs are allowed here too
        validate(check);
    }

    const int n = grid.n;
    const double h = grid.h;
    const double cb = mp.c + mp.beta;

    // Own density table and trapezoid weights (independent of the solver path).
    std::vector<double> rho((std::size_t)n + 1, 0.0);
    for (int j = 0; j <= n; ++j) rho[(std::size_t)j] = dist.density(grid.x(j));
    for (double jp : dist.jump_points()) {
        const int j = (int)std::llround(jp / h);
        if (j >= 0 && j <= n && std::abs(grid.x(j) - jp) < 1e-9 * std::max(1.0, jp))
            rho[(std::size_t)j] = 0.5 * (dist.density(jp - 0.25 * h) + dist.density(jp + 0.25 * h));
    }

    const auto conv_row = [&](int i, Eigen::VectorXd& row) {
        // integral_0^{x_i} V(x_i - a) rho(a) da, trapezoid in a
        if (i == 0) return;
        for (int j = 0; j <= i; ++j) {
            const double w = (j == 0 || j == i) ? 0.5 : 1.0;
            row[i - j] += w * h * rho[(std::size_t)j];
        }
    };

    const auto conv_value = [&](const Eigen::VectorXd& V, int i) {
        if (i == 0) return 0.0;
        double s = 0.0;
        for (int j = 0; j <= i; ++j) {
            const double w = (j == 0 || j == i) ? 0.5 : 1.0;
            s += w * h * rho[(std::size_t)j] * V[i - j];
        }
        return s;
    };

    const double vmax_bound = grid.x_max + mp.p / mp.c;
    const double tol = (opts.tol > 0.0) ? opts.tol : 1e-6 * cb * vmax_bound;

    // Start from the all-continue policy with full investment.
    Policy pol;
    pol.pay.assign((std::size_t)n + 1, 0);
    pol.gamma.assign((std::size_t)n + 1, opts.gamma_max);
    pol.pay[(std::size_t)n] = 1;

    Eigen::VectorXd V = Eigen::VectorXd::Zero(n + 1);
    for (int i = 0; i <= n; ++i) V[i] = grid.x(i) + mp.p / mp.c;

    OracleSolution out;
    Policy prev_pol;

    for (int it = 0; it < opts.max_iter; ++it) {
        // --- solve the linear system of the current policy ---
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);

        for (int i = 0; i <= n; ++i) {
            if (i == n || pol.pay[(std::size_t)i]) {
                if (i == 0) { // forward difference at the left boundary
                    A(0, 0) = -1.0 / h;
                    A(0, 1) = 1.0 / h;
                    b[0] = 1.0;
                } else {
                    A(i, i) = 1.0 / h;
                    A(i, i - 1) = -1.0 / h;
                    b[i] = 1.0;
                }
                continue;
            }
            const double x = grid.x(i);
            const double g = pol.gamma[(std::size_t)i];
            const double diff = 0.5 * mp.sigma * mp.sigma * g * g * x * x;
            const double drift = mp.p + mp.r * g * x;
            if (i == 0) {
                // degenerate node: p V'(0) - (c+beta) V(0) = 0, one-sided
                A(0, 0) = -mp.p / h - cb;
                A(0, 1) = mp.p / h;
                b[0] = 0.0;
                continue;
            }
            A(i, i + 1) += diff / (h * h) + drift / h;
            A(i, i) += -2.0 * diff / (h * h) - drift / h - cb;
            A(i, i - 1) += diff / (h * h);
            Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
            conv_row(i, row);
            for (int j = 0; j <= i; ++j)
                if (row[j] != 0.0) A(i, j) += mp.beta * row[j];
            b[i] = 0.0;
        }

        V = A.partialPivLu().solve(b);

        // --- improve the policy and measure the HJB residual ---
        Policy next = pol;
        double resid = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = grid.x(i);
            const double vp_f = (i < n) ? (V[i + 1] - V[i]) / h : 1.0;
            const double vp_b = (i > 0) ? (V[i] - V[i - 1]) / h : vp_f;
            const double vpp =
                (i > 0 && i < n) ? (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (h * h) : 0.0;

            const double conv = conv_value(V, i);
            const auto op = [&](double g) {
                return 0.5 * mp.sigma * mp.sigma * g * g * x * x * vpp +
                       (mp.p + mp.r * g * x) * vp_f - cb * V[i] + mp.beta * conv;
            };
            double gbest = 0.0, lbest = op(0.0);
            if (opts.gamma_max > 0.0) {
                const double lg = op(opts.gamma_max);
                if (lg > lbest) {
                    lbest = lg;
                    gbest = opts.gamma_max;
                }
                const double a2 = 0.5 * mp.sigma * mp.sigma * x * x * vpp;
                if (a2 < 0.0) {
                    const double vtx =
                        std::clamp(-mp.r * x * vp_f / (2.0 * a2), 0.0, opts.gamma_max);
                    const double lv = op(vtx);
                    if (lv > lbest) {
                        lbest = lv;
                        gbest = vtx;
                    }
                }
            }
            const double pay_resid = 1.0 - ((i > 0) ? vp_b : vp_f);
            if (i == n) {
                next.gamma[(std::size_t)i] = gbest;
                resid = std::max(resid, std::abs(pay_resid));
                continue;
            }
            next.pay[(std::size_t)i] = (pay_resid >= lbest) ? 1 : 0;
            next.gamma[(std::size_t)i] = gbest;
            resid = std::max(resid, std::max(pay_resid, lbest));
        }

        out.iterations = it + 1;
        out.residual = resid;
        out.sweep_residuals.push_back(resid);

        if (resid <= tol && next == pol) break;
        // Two-cycles at the tolerance floor count as converged; V matches pol.
        if (it >= 1 && next == prev_pol && resid <= 10.0 * tol) break;
        if (it + 1 == opts.max_iter)
            raise(Errc::NoConvergence, "policy iteration did not settle");
        prev_pol = pol;
        pol = next;
    }

    out.v = GridFn(grid);
    for (int i = 0; i <= n; ++i) out.v.values[(std::size_t)i] = V[i];
    for (int i = 0; i < n; ++i)
        out.v.deriv[(std::size_t)i] = (V[i + 1] - V[i]) / h;
    out.v.deriv[(std::size_t)n] = 1.0;
    out.pay = pol.pay;
    out.gamma = pol.gamma;
    return out;
}

} // namespace divopt
