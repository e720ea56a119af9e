#include "predasym/rng.hpp"

#include <cmath>

namespace predasym {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}
} // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t state = master.value;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t p : path) {
        state = h ^ (p + 0x632BE59BD9B4E019ULL);
        h = splitmix64(state);
    }
    return Seed{h};
}

Rng::Rng(Seed seed) noexcept
{
    std::uint64_t state = seed.value;
    for (auto& word : s_) {
        word = splitmix64(state);
    }
}

std::uint64_t Rng::next_u64() noexcept
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept
{
    return lo + (hi - lo) * uniform();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) noexcept
{
    if (hi <= lo) {
        return lo;
    }
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    // rejection sampling removes modulo bias
    const std::uint64_t limit = range == 0 ? 0 : (~std::uint64_t{0} - range + 1) % range;
    std::uint64_t x = next_u64();
    while (x < limit) {
        x = next_u64();
    }
    return lo + static_cast<std::int64_t>(range == 0 ? x : x % range);
}

double Rng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

double Rng::normal(double mean, double sd) noexcept
{
    return mean + sd * normal();
}

} // namespace predasym
