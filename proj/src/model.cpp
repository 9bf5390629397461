#include "divopt/model.hpp"

#include <algorithm>
#include <cmath>

namespace divopt {

void validate(const ModelParams& m) {
    if (!(m.p > 0.0)) raise(Errc::NonPositiveParam, "premium rate p must be > 0");
    if (!(m.beta > 0.0)) raise(Errc::NonPositiveParam, "claim intensity beta must be > 0");
    if (!(m.sigma > 0.0)) raise(Errc::NonPositiveParam, "volatility sigma must be > 0");
    if (!(m.r > 0.0)) raise(Errc::NonPositiveParam, "drift r must be > 0");
    if (!(m.c > m.r)) raise(Errc::DiscountBelowDrift, "require c > r (value function infinite otherwise)");
}

ClaimDist ClaimDist::exponential(double rate) {
    if (!(rate > 0.0)) raise(Errc::NonPositiveParam, "exponential rate must be > 0");
    ClaimDist d;
    d.kind_ = Kind::Exponential;
    d.rate_ = rate;
    d.mean_ = 1.0 / rate;
    d.density_bound_ = rate;
    d.support_max_ = -std::log(1e-12) / rate;
    return d;
}

ClaimDist ClaimDist::piecewise_uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo)) raise(Errc::NonPositiveParam, "require 0 <= lo < hi");
    ClaimDist d;
    d.kind_ = Kind::PiecewiseUniform;
    d.lo_ = lo;
    d.hi_ = hi;
    d.mean_ = 0.5 * (lo + hi);
    d.density_bound_ = 1.0 / (hi - lo);
    d.support_max_ = hi;
    if (lo > 0.0) d.jumps_.push_back(lo);
    d.jumps_.push_back(hi);
    return d;
}

ClaimDist ClaimDist::tabulated(double step, std::vector<double> samples) {
    if (!(step > 0.0) || samples.size() < 2)
        raise(Errc::NonPositiveParam, "tabulated density needs step > 0 and >= 2 samples");
    for (double v : samples)
        if (!(v >= 0.0)) raise(Errc::NonPositiveParam, "tabulated density sample is negative");

    ClaimDist d;
    d.kind_ = Kind::Tabulated;
    d.step_ = step;

    // Renormalize so the piecewise-linear interpolant integrates to one.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        total += 0.5 * step * (samples[i] + samples[i + 1]);
    if (!(total > 0.0)) raise(Errc::NonPositiveParam, "tabulated density integrates to zero");
    for (double& v : samples) v /= total;

    d.dens_ = std::move(samples);
    d.cum_.assign(d.dens_.size(), 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < d.dens_.size(); ++i) {
        d.cum_[i + 1] = d.cum_[i] + 0.5 * step * (d.dens_[i] + d.dens_[i + 1]);
        const double x0 = step * (double)i, x1 = x0 + step;
        // exact first moment of the linear segment
        mean += step * (d.dens_[i] * (2.0 * x0 + x1) + d.dens_[i + 1] * (x0 + 2.0 * x1)) / 6.0;
    }
    d.cum_.back() = 1.0;
    d.mean_ = mean;
    d.density_bound_ = *std::max_element(d.dens_.begin(), d.dens_.end());
    d.support_max_ = step * (double)(d.dens_.size() - 1);
    return d;
}

double ClaimDist::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::Exponential:
            return -std::expm1(-rate_ * x);
        case Kind::PiecewiseUniform:
            if (x <= lo_) return 0.0;
            if (x >= hi_) return 1.0;
            return (x - lo_) / (hi_ - lo_);
        case Kind::Tabulated: {
            if (x >= support_max_) return 1.0;
            const double t = x / step_;
            const auto i = (std::size_t)t;
            const double s = x - step_ * (double)i;
            const double d0 = dens_[i], d1 = dens_[i + 1];
            return cum_[i] + s * d0 + 0.5 * s * s * (d1 - d0) / step_;
        }
    }
    return 0.0;
}

double ClaimDist::density(double x) const {
    if (x < 0.0) return 0.0;
    switch (kind_) {
        case Kind::Exponential:
            return rate_ * std::exp(-rate_ * x);
        case Kind::PiecewiseUniform:
            return (x > lo_ && x <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
        case Kind::Tabulated: {
            if (x >= support_max_) return 0.0;
            const double t = x / step_;
            const auto i = (std::size_t)t;
            const double w = t - (double)i;
            return dens_[i] * (1.0 - w) + dens_[i + 1] * w;
        }
    }
    return 0.0;
}

double ClaimDist::sample(double u) const {
    if (!(u > 0.0 && u < 1.0)) raise(Errc::DomainError, "sample() needs u in (0,1)");
    switch (kind_) {
        case Kind::Exponential:
            return -std::log1p(-u) / rate_;
        case Kind::PiecewiseUniform:
            return lo_ + u * (hi_ - lo_);
        case Kind::Tabulated: {
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
            std::size_t i = (std::size_t)std::distance(cum_.begin(), it);
            i = (i == 0) ? 0 : i - 1;
            if (i + 1 >= cum_.size()) return support_max_;
            // Within the cell the cdf is c0 + d0*s + (d1-d0)/(2h) * s^2; invert.
            const double c0 = cum_[i], d0 = dens_[i], d1 = dens_[i + 1];
            const double q = u - c0;
            const double a = 0.5 * (d1 - d0) / step_;
            double s;
            if (std::abs(a) < 1e-14 * (d0 + 1e-300)) {
                s = (d0 > 0.0) ? q / d0 : 0.0;
            } else {
                const double disc = d0 * d0 + 4.0 * a * q;
                s = (-d0 + std::sqrt(std::max(disc, 0.0))) / (2.0 * a);
            }
            s = std::clamp(s, 0.0, step_);
            return step_ * (double)i + s;
        }
    }
    return 0.0;
}

} // namespace divopt
