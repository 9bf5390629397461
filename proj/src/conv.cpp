#include "divopt/conv.hpp"

#include <algorithm>
#include <cmath>

#include "divopt/kernels.hpp"

namespace divopt {

ClaimConvolution::ClaimConvolution(const ClaimDist& dist, const Grid& grid) : grid_(grid) {
    jmax_ = std::min(grid.n, (int)std::ceil(dist.support_max() / grid.h) + 1);
    jmax_ = std::max(jmax_, 1);
    dens_.resize((std::size_t)jmax_ + 1);
    for (int j = 0; j <= jmax_; ++j) dens_[(std::size_t)j] = dist.density(grid.x(j));
    // Average the one-sided limits at nodes sitting exactly on a jump.
    const double eps = 0.25 * grid.h;
    for (double jp : dist.jump_points()) {
        const int j = (int)std::llround(jp / grid.h);
        if (j < 0 || j > jmax_) continue;
        if (std::abs(grid.x(j) - jp) < 1e-9 * std::max(1.0, jp))
            dens_[(std::size_t)j] = 0.5 * (dist.density(jp - eps) + dist.density(jp + eps));
    }
}

double ClaimConvolution::hist_part(std::span<const double> f, int i) const {
    if (i <= 0) return 0.0;
    const int lo = std::max(0, i - jmax_);
    const int m = i - lo; // density index of the far endpoint
    if (m <= 0) return 0.0;
    // sum_{k=lo}^{i-1} f[k] * dens[i-k], then halve the far endpoint term
    double s = kernels::dot_rev(f.data() + lo, dens_.data() + 1, (std::size_t)m);
    s -= 0.5 * f[(std::size_t)lo] * dens_[(std::size_t)m];
    return grid_.h * s;
}

double ClaimConvolution::integrate(std::span<const double> f, int i) const {
    if (i <= 0) return 0.0;
    return hist_part(f, i) + endpoint_weight() * f[(std::size_t)i];
}

double m_operator(const ClaimConvolution& cv, std::span<const double> f,
                  const ModelParams& params, int i) {
    return (params.c + params.beta) * f[(std::size_t)i] - params.beta * cv.integrate(f, i);
}

double m_operator(const ClaimConvolution& cv, std::span<const double> f,
                  std::span<const double> w0, int i0, const ModelParams& params, int i) {
    if (i < i0) raise(Errc::DomainError, "m_operator: node below the continuation start");
    // Merge once; the claim integral only ever reads (x_i - a) <= x_i.
    std::vector<double> merged(f.begin(), f.begin() + i + 1);
    for (int k = 0; k < i0 && k <= i; ++k) merged[(std::size_t)k] = w0[(std::size_t)k];
    return m_operator(cv, merged, params, i);
}

} // namespace divopt
