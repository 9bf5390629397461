#include "divopt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "divopt/rng.hpp"

namespace divopt {

void StrategySpec::check() const {
    bands.check();
    for (double g : gamma.values)
        if (!(g >= 0.0 && g <= 1.0)) raise(Errc::DomainError, "gamma outside [0,1]");
    if (zero_absorbing != bands.zero_absorbing())
        raise(Errc::DomainError, "zero_absorbing flag inconsistent with the band structure");
}

StrategySpec strategy_from_candidate(const CandidateValue& cand) {
    StrategySpec s;
    s.bands = cand.bands;
    s.zero_absorbing = s.bands.zero_absorbing();
    s.gamma = GridFn(cand.core.grid);
    s.gamma.values = cand.gamma;
    for (double& g : s.gamma.values) g = std::clamp(g, 0.0, 1.0);
    s.check();
    return s;
}

namespace {

struct Position {
    int band = 0;      // index of the containing band
    bool absorbed = false;
};

// Pay everything above the nearest band top at or below x; returns the lump.
double settle(const BandStructure& bs, double& x, Position& pos) {
    const auto& bands = bs.bands;
    double paid = 0.0;
    // Containing band, if any. A positive band bottom belongs to the payout
    // region below (pay-down intervals are right-closed), so containment is
    // strict there.
    for (std::size_t j = 0; j < bands.size(); ++j) {
        const bool above_bottom = (bands[j].bottom == 0.0) ? x >= 0.0 : x > bands[j].bottom;
        if (above_bottom && x <= bands[j].top) {
            pos.band = (int)j;
            pos.absorbed = (bands[j].top == 0.0);
            return paid;
        }
    }
    // otherwise x sits above some band top (x >= 0 = bands[0].bottom always)
    int k = -1;
    for (std::size_t j = 0; j < bands.size(); ++j)
        if (bands[j].top <= x) k = (int)j;
    if (k < 0) {
        // between 0 and the first band bottom can only happen with a positive
        // first bottom, which the structures built here never produce
        pos.band = 0;
        pos.absorbed = false;
        return paid;
    }
    paid = x - bands[(std::size_t)k].top;
    x = bands[(std::size_t)k].top;
    pos.band = k;
    pos.absorbed = (bands[(std::size_t)k].top == 0.0);
    return paid;
}

double gamma_clamped(const GridFn& g, double x) {
    if (x <= 0.0) return g.values.front();
    if (x >= g.grid.x_max) return g.values.back();
    return std::clamp(g.eval(x), 0.0, 1.0);
}

} // namespace

PathResult simulate_path(const StrategySpec& spec, double x0, const ModelParams& mp,
                         const ClaimDist& dist, double dt, double t_max,
                         std::uint64_t master_seed, std::uint64_t path_index) {
    if (!(dt > 0.0) || dt >= 0.1 / mp.beta)
        raise(Errc::ConfigError, "dt must be positive and below 1/(10 beta)");
    if (!(x0 >= 0.0)) raise(Errc::DomainError, "x0 must be nonnegative");

    const rng::PathRng prng(master_seed, path_index);
    const auto& bands = spec.bands.bands;

    double x = x0;
    double t = 0.0;
    double divs = 0.0;
    Position pos;

    divs += settle(spec.bands, x, pos); // initial lump at t = 0

    std::uint64_t claim_idx = 0;
    double t_claim = prng.exp_time(claim_idx, mp.beta);
    std::uint64_t step_idx = 0;

    while (t < t_max) {
        if (pos.absorbed) {
            // Zero surplus with an absorbing bottom band: gamma x = 0 freezes
            // the diffusion; the premium stream goes straight to dividends
            // until the next claim causes ruin.
            const double t_stop = std::min(t_claim, t_max);
            if (t_stop > t)
                divs += mp.p * (std::exp(-mp.c * t) - std::exp(-mp.c * t_stop)) / mp.c;
            if (t_claim >= t_max) return {divs, false};
            return {divs, true}; // claim at zero surplus: ruin
        }

        const double dtc = std::min({dt, t_claim - t, t_max - t});
        const double top = bands[(std::size_t)pos.band].top;
        const double g = gamma_clamped(spec.gamma, x);
        const double s_loc = mp.sigma * g * x;
        const auto draw = prng.step_draw(step_idx++);
        const double x_free =
            x + (mp.p + mp.r * g * x) * dtc + s_loc * std::sqrt(dtc) * draw.z;

        // Running maximum of the free path over the step (Brownian bridge
        // given the endpoints); the excess over the band top is the reflected
        // payout increment.
        double x_new = x_free;
        if (s_loc > 0.0) {
            const double span = x_free - x;
            const double mx = 0.5 * (x + x_free +
                                     std::sqrt(span * span -
                                               2.0 * s_loc * s_loc * dtc * std::log(draw.u_bridge)));
            if (mx > top) {
                const double dl = mx - top;
                divs += dl * std::exp(-mp.c * (t + dtc));
                x_new = x_free - dl;
            }
        } else if (x_free > top) {
            const double dl = x_free - top;
            divs += dl * std::exp(-mp.c * (t + dtc));
            x_new = top;
        }
        x = x_new;
        t += dtc;

        if (x < bands[(std::size_t)pos.band].bottom) {
            // diffused below the band bottom into a payout region
            if (x < 0.0) x = 0.0; // discrete-step artifact; diffusion dies at zero
            const double lump = settle(spec.bands, x, pos);
            if (lump > 0.0) divs += lump * std::exp(-mp.c * t);
        }

        if (t >= t_claim - 1e-9 * dt && t < t_max) {
            const double u = dist.sample(prng.claim_u(claim_idx));
            x -= u;
            ++claim_idx;
            t_claim = t + prng.exp_time(claim_idx, mp.beta);
            if (x < 0.0) return {divs, true};
            const double lump = settle(spec.bands, x, pos);
            if (lump > 0.0) divs += lump * std::exp(-mp.c * t);
        }
    }
    return {divs, false};
}

SimReport estimate_value(const StrategySpec& spec, double x0, const ModelParams& mp,
                         const ClaimDist& dist, const SimConfig& cfg) {
    if (cfg.n_paths < 100) raise(Errc::ConfigError, "need at least 100 paths");
    if (!(cfg.dt > 0.0) || cfg.dt >= 0.1 / mp.beta)
        raise(Errc::ConfigError, "dt must be positive and below 1/(10 beta)");
    spec.check();

    const double a_star = spec.bands.a_star();
    double t_max = cfg.t_max;
    if (!(t_max > 0.0)) {
        // e^{-c t} (a* + p/c) <= target * (x0 + p/(beta+c)), the value lower bound
        const double scale = cfg.truncation_target * (x0 + mp.p / (mp.beta + mp.c));
        t_max = std::log((a_star + mp.p / mp.c) / scale) / mp.c;
        t_max = std::max(t_max, 1.0);
    }

    std::vector<double> result((std::size_t)cfg.n_paths, 0.0);
    std::vector<unsigned char> ruined((std::size_t)cfg.n_paths, 0);

    int threads = cfg.threads > 0 ? cfg.threads : (int)std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1, 64);

    const auto worker = [&](long lo, long hi) {
        for (long k = lo; k < hi; ++k) {
            const PathResult r =
                simulate_path(spec, x0, mp, dist, cfg.dt, t_max, cfg.seed, (std::uint64_t)k);
            result[(std::size_t)k] = r.discounted_dividends;
            ruined[(std::size_t)k] = r.ruined ? 1 : 0;
        }
    };

    if (threads == 1) {
        worker(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (cfg.n_paths + threads - 1) / threads;
        for (int ti = 0; ti < threads; ++ti) {
            const long lo = (long)ti * chunk;
            const long hi = std::min<long>(lo + chunk, cfg.n_paths);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction keeps the report independent of the thread layout.
    double sum = 0.0;
    long nruin = 0;
    for (long k = 0; k < cfg.n_paths; ++k) {
        sum += result[(std::size_t)k];
        nruin += ruined[(std::size_t)k];
    }
    const double mean = sum / (double)cfg.n_paths;
    double ss = 0.0;
    for (long k = 0; k < cfg.n_paths; ++k) {
        const double d = result[(std::size_t)k] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / (double)(cfg.n_paths - 1));

    SimReport rep;
    rep.estimate = mean;
    rep.stderr_est = sd / std::sqrt((double)cfg.n_paths);
    rep.truncation_bound = std::exp(-mp.c * t_max) * (a_star + mp.p / mp.c);
    rep.ruin_fraction = (double)nruin / (double)cfg.n_paths;
    rep.n_paths = cfg.n_paths;
    rep.t_max = t_max;
    return rep;
}

} // namespace divopt
