#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace crcg {

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Stable seed derivation: master -> tag bytes -> index. Two streams with
// different (tag, index) are statistically independent for practical purposes.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

// xoshiro256** with splitmix64 state expansion.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng stream(std::uint64_t master, std::string_view tag, std::uint64_t index);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);

    // Inclusive on both ends.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    bool bernoulli(double p);

    // Standard normal via Box-Muller; only z0 is used, no cached second value.
    double normal();
    double normal(double mean, double stddev);

private:
    std::array<std::uint64_t, 4> s_;
};

}  // namespace crcg
