#pragma once

#include <cstdint>

namespace rcs {

// SplitMix64 stream. All randomness in the project flows through this type so
// that results are reproducible bit-for-bit across platforms; std::random
// distributions are implementation-defined and deliberately avoided.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

    // Derive an independent child stream without consuming parent state.
    Rng split(std::uint64_t tag) const {
        std::uint64_t z = state_ ^ (tag * 0xd6e8feb86659fd93ull + 0xa3c59ac2f0ull);
        z = (z ^ (z >> 32)) * 0xd6e8feb86659fd93ull;
        z ^= z >> 32;
        return Rng(z);
    }

  private:
    std::uint64_t state_;
};

}  // namespace rcs
