#pragma once

#include <cmath>
#include <cstdint>

namespace jdlab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// A stream is addressed by a 64-bit key and a 64-bit block index; every
// (key, block) pair yields the same four 32-bit words no matter which
// thread asks for them, which is what makes ensembles scheduling-proof.
class Philox {
public:
    Philox(std::uint64_t key, std::uint64_t block_hi)
        : key0_(static_cast<std::uint32_t>(key)),
          key1_(static_cast<std::uint32_t>(key >> 32)),
          hi_(block_hi) {}

    // 128 bits of output for block (hi_, lo).
    void block(std::uint64_t lo, std::uint32_t out[4]) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(lo);
        std::uint32_t c1 = static_cast<std::uint32_t>(lo >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(hi_);
        std::uint32_t c3 = static_cast<std::uint32_t>(hi_ >> 32);
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }

private:
    std::uint32_t key0_, key1_;
    std::uint64_t hi_;
};

// SplitMix64 finaliser; used to derive well-separated subkeys from
// (seed, replication) without any sequential state.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t replication) {
    return mix64(seed ^ mix64(replication + 0x632BE59BD9B4E019ULL));
}

// Draws from the substream addressed by (key, step). Each step owns 2^64
// 128-bit blocks, so a step may consume any number of variates without
// colliding with its neighbours.
class RandomStream {
public:
    RandomStream(std::uint64_t key, std::uint64_t step)
        : gen_(key, step), next_block_(0), have_(0), cached_normal_(false), normal_(0.0) {}

    // uniform on (0,1); 53-bit mantissa, never returns 0 or 1
    double uniform() {
        const std::uint64_t bits = next64();
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (two uniforms per pair, second cached)
    double normal() {
        if (cached_normal_) {
            cached_normal_ = false;
            return normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        normal_ = r * std::sin(a);
        cached_normal_ = true;
        return r * std::cos(a);
    }

    // Poisson by inverted CDF scan; intended for small means (jump counts
    // per time step). One uniform per draw.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        int k = 0;
        while (u > cdf && k < 10000) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

    std::uint64_t next64() {
        if (have_ == 0) {
            gen_.block(next_block_++, buf_);
            have_ = 4;
        }
        const std::uint32_t w0 = buf_[4 - have_];
        --have_;
        if (have_ == 0) {
            gen_.block(next_block_++, buf_);
            have_ = 4;
        }
        const std::uint32_t w1 = buf_[4 - have_];
        --have_;
        return (static_cast<std::uint64_t>(w0) << 32) | w1;
    }

private:
    Philox gen_;
    std::uint64_t next_block_;
    std::uint32_t buf_[4];
    int have_;
    bool cached_normal_;
    double normal_;
};

} // namespace jdlab
