// Deterministic random-number streams.
//
// Generator: xoshiro256++ seeded through SplitMix64. Every logical noise
// source in a run owns its own stream, derived from the master seed by
// derive_stream_seed(master, rep, role, index). The derivation is part of the
// output contract: the same (config, master seed) always produces the same
// draws regardless of thread count or execution order, because streams never
// share state. Cross-implementation bit-equality is a non-goal; determinism
// within this implementation is mandatory.

#pragma once

#include <cmath>
#include <cstdint>

namespace eftqdi {

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// Role tags keep streams for distinct purposes disjoint by construction.
enum class StreamRole : std::uint64_t {
    markov = 1,       // topology switching, one stream per rep
    regressor = 2,    // one stream per (rep, node)
    measurement = 3,  // one stream per (rep, node)
    channel = 4,      // one stream per (rep, directed union edge)
    rep_base = 5,     // informational per-rep tag recorded in results
};

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t rep,
                                        StreamRole role, std::uint64_t index) {
    SplitMix64 sm{master};
    std::uint64_t x = sm.next();
    sm.state = x ^ (0x9E3779B97F4A7C15ull * (rep + 1));
    x = sm.next();
    sm.state = x ^ (0xBF58476D1CE4E5B9ull * (static_cast<std::uint64_t>(role) + 1));
    x = sm.next();
    sm.state = x ^ (0x94D049BB133111EBull * (index + 1));
    return sm.next();
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : state_) w = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // 53-bit mantissa uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; the pair's second value is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double a = 2.0 * kPi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4] = {};
    bool has_cached_ = false;
    double cached_ = 0.0;
};

inline Rng make_stream(std::uint64_t master, std::uint64_t rep, StreamRole role,
                       std::uint64_t index) {
    return Rng(derive_stream_seed(master, rep, role, index));
}

}  // namespace eftqdi
