#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace predasym {

/// Seed for every stochastic routine. Same seed and parameters give
/// bit-identical output on any platform with IEEE doubles.
struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(const Seed&, const Seed&) = default;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derive an independent child seed, e.g. for realization `i` of an
/// ensemble. Deterministic and order independent.
Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> path) noexcept;

/// xoshiro256** generator seeded through splitmix64.
///
/// Uniform and normal variates are produced here rather than through
/// <random> distributions, whose algorithms differ between standard
/// library implementations.
class Rng {
public:
    explicit Rng(Seed seed) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept;

    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;
    double normal(double mean, double sd) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace predasym
