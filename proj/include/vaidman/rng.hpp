#pragma once

// Seeded substreams. Every consumer of randomness (a party's basis choices, the
// quantum sampling, a cheat model, a Monte Carlo chunk) draws from its own
// generator derived from (seed, stream, index), so results never depend on
// thread count or on how many draws another consumer made.

#include <cstdint>
#include <random>

namespace vaidman {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
    MonteCarlo = 1,
    Nature = 2,
    AliceBasis = 3,
    BobBasis = 4,
    CharlieBasis = 5,
    AliceCheat = 6,
    BobCheat = 7,
    SessionId = 8,
};

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) + index);
}

class Rng {
  public:
    Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) : engine_(derive_seed(seed, stream, index)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool coin() { return uniform() < 0.5; }

    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace vaidman
