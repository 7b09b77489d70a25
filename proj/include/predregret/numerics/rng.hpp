#pragma once

// Seeded, splittable random streams. Replicates derive child streams from
// (master_seed, stream_id) so parallel evaluation order cannot change results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace predregret {

struct SeededStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    SeededStream child(std::uint64_t index) const {
        return SeededStream{master_seed, stream_id * 0x9e3779b97f4a7c15ULL + index + 1};
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// xoshiro-style generator seeded from a SeededStream; identical streams
/// reproduce identical draws on every platform.
class RandomStream {
public:
    explicit RandomStream(SeededStream s) {
        std::uint64_t seed = s.master_seed;
        const std::uint64_t a = detail::splitmix64(seed);
        seed ^= s.stream_id * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
        const std::uint64_t b = detail::splitmix64(seed);
        state_[0] = a ? a : 0x853c49e6748fea9bULL;
        state_[1] = b ? b : 0x94d049bb133111ebULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t s0 = state_[0];
        std::uint64_t s1 = state_[1];
        const std::uint64_t result = s0 + s1;
        s1 ^= s0;
        state_[0] = rotl(s0, 55) ^ s1 ^ (s1 << 14);
        state_[1] = rotl(s1, 36);
        return result;
    }

    /// Uniform draw in (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (implementation-independent).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(angle);
        have_cached_ = true;
        return r * std::cos(angle);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[2];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    long replicates = 0;
};

/// Mean and standard error of a statistic over seeded replicates. Each
/// replicate draws from its own child stream, so the estimate is invariant
/// to evaluation order.
template <class Statistic>
MonteCarloEstimate mc_mean(SeededStream stream, long replicates, Statistic&& statistic) {
    if (replicates < 2) throw std::invalid_argument("mc_mean: need replicates >= 2");
    double sum = 0.0, sumsq = 0.0;
    for (long r = 0; r < replicates; ++r) {
        RandomStream rs(stream.child(static_cast<std::uint64_t>(r)));
        const double v = statistic(rs);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(replicates);
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(replicates) * mean * mean) /
                          (static_cast<double>(replicates) - 1.0));
    return {mean, std::sqrt(var / static_cast<double>(replicates)), replicates};
}

}  // namespace predregret
