#pragma once

#include <cstdint>

namespace lbsim {

/// SplitMix64 step, used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** — the project PRNG (see kRngName). Substreams are derived
/// from a master seed and a caller-chosen stream id, so per-(switch,
/// commodity) arrival processes stay aligned when unrelated parts of a
/// scenario change.
class Rng {
public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t sm = master_seed ^ (0x6a09e667f3bcc909ULL + stream_id * 0x9e3779b97f4a7c15ULL);
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Bernoulli(p) with p given as a double in [0, 1].
    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// Stable stream id for arrival substreams and similar per-entity streams.
inline std::uint64_t stream_id(std::uint64_t tag, std::int64_t a, std::int64_t b) {
    std::uint64_t s = tag;
    s = s * 0x100000001b3ULL + static_cast<std::uint64_t>(a + 1);
    s = s * 0x100000001b3ULL + static_cast<std::uint64_t>(b + 1);
    return s;
}

} // namespace lbsim
