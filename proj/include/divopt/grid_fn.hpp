#pragma once

#include <cmath>
#include <vector>

#include "divopt/errors.hpp"

namespace divopt {

/// Uniform mesh on [0, x_max] with nodes x_i = i*h, i = 0..n.
struct Grid {
    double x_max = 0.0;
    double h = 0.0;
    int n = 0; // number of cells; n+1 nodes

    static Grid make(double x_max, double h) {
        if (!(h > 0.0) || !(x_max > 0.0)) raise(Errc::NonPositiveParam, "grid needs x_max > 0, h > 0");
        Grid g;
        g.n = (int)std::llround(x_max / h);
        if (g.n < 16) raise(Errc::GridTooShort, "grid needs at least 16 cells");
        g.h = h;
        g.x_max = g.n * h; // snap so n*h == x_max exactly
        return g;
    }

    double x(int i) const { return h * (double)i; }

    int cell_of(double xq) const {
        int i = (int)std::floor(xq / h);
        if (i < 0) i = 0;
        if (i >= n) i = n - 1;
        return i;
    }
};

/// Function samples on a Grid: values plus first-derivative samples.
/// Evaluation is cubic-Hermite on the containing cell, so polynomials up to
/// degree three are reproduced exactly and the stored derivative is the one
/// every downstream formula consumes.
struct GridFn {
    Grid grid;
    std::vector<double> values; // length n+1
    std::vector<double> deriv;  // length n+1

    GridFn() = default;
    GridFn(const Grid& g, double init_value = 0.0, double init_deriv = 0.0)
        : grid(g), values((std::size_t)g.n + 1, init_value), deriv((std::size_t)g.n + 1, init_deriv) {}

    double eval(double x) const;
    double eval_deriv(double x) const;

    /// Max over cells of |(v[i+1]-v[i])/h - (d[i]+d[i+1])/2|; solver output
    /// keeps this O(h^2).
    double trapezoid_consistency() const;
};

} // namespace divopt
