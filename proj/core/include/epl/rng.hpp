#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace epl {

/// Seeded random stream. Bounded draws are implemented here rather than with
/// <random> distributions so results are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [lo, hi] (inclusive), unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Uniform real in [0, 1) with 53 bits of resolution.
    double uniform01();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    double normal();

    /// Independent child stream keyed by a label; the parent is not advanced,
    /// so adding streams never perturbs existing ones.
    Rng derive(std::string_view label) const;
    Rng derive(std::string_view label, std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label, std::uint64_t index = 0);

} // namespace epl
