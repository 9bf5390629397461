#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Counter-based random numbers (Philox-4x32-10). Every draw is a pure
// function of (master seed, path index, stream, counter), so paths can run
// in any order or thread layout and reproduce bit-identically.
namespace divopt::rng {

struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key, std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = (std::uint32_t)key;
        std::uint32_t k1 = (std::uint32_t)(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = (std::uint64_t)M0 * ctr[0];
            const std::uint64_t p1 = (std::uint64_t)M1 * ctr[2];
            const std::uint32_t hi0 = (std::uint32_t)(p0 >> 32), lo0 = (std::uint32_t)p0;
            const std::uint32_t hi1 = (std::uint32_t)(p1 >> 32), lo1 = (std::uint32_t)p1;
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += W0;
            k1 += W1;
        }
        return ctr;
    }
};

/// Per-path deterministic stream view.
class PathRng {
public:
    PathRng(std::uint64_t master_seed, std::uint64_t path) : seed_(master_seed), path_(path) {}

    enum Stream : std::uint32_t { Diffusion = 0, ClaimTime = 1, ClaimSize = 2 };

    std::array<std::uint32_t, 4> block(Stream s, std::uint64_t index) const {
        return Philox4x32::block(seed_, {(std::uint32_t)index, (std::uint32_t)(index >> 32),
                                         (std::uint32_t)path_,
                                         (std::uint32_t)(path_ >> 32) ^ (s << 28)});
    }

    static double u01(std::uint32_t b) { return ((double)b + 0.5) * (1.0 / 4294967296.0); }

    /// Standard normal (lanes 0,1) and an independent uniform (lane 2) from
    /// one block; the uniform feeds the bridge-maximum draw of the same step.
    struct StepDraw {
        double z;
        double u_bridge;
    };
    StepDraw step_draw(std::uint64_t step) const {
        const auto b = block(Diffusion, step);
        const double u1 = u01(b[0]);
        const double u2 = u01(b[1]);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return {z, u01(b[2])};
    }

    double exp_time(std::uint64_t claim_index, double rate) const {
        const auto b = block(ClaimTime, claim_index);
        return -std::log(u01(b[0])) / rate;
    }

    /// 53-bit uniform in (0,1) for inverse-cdf claim sampling.
    double claim_u(std::uint64_t claim_index) const {
        const auto b = block(ClaimSize, claim_index);
        const std::uint64_t hi = (std::uint64_t)b[0] << 21;
        const std::uint64_t lo = (std::uint64_t)b[1] >> 11;
        return ((double)(hi | lo) + 0.5) * (1.0 / 9007199254740992.0);
    }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
};

} // namespace divopt::rng
