// Deterministic 64-bit PRNG used everywhere randomness is needed.
//
// All seeded behavior in the toolkit (stimulus generation, fault sampling,
// mutant selection) flows through Xoshiro256** seeded via SplitMix64, so
// results are bit-reproducible across platforms and standard-library
// implementations. <random> distributions are avoided on purpose: their
// output is not specified portably.

#pragma once

#include <cstdint>

namespace sfqv {

// SplitMix64, used to expand a single 64-bit seed into generator state.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Xoshiro256** 1.0 (Blackman & Vigna).
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, bound) via Lemire multiply-shift. Slight modulo-free
    // bias (< 2^-32 for desk-scale bounds) is acceptable and reproducible.
    uint64_t below(uint64_t bound) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return next_double() < p; }

    bool next_bit() { return (next_u64() >> 63) != 0; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4]{};
};

} // namespace sfqv
