#include "epl/common.hpp"
#include "epl/rng.hpp"

#include <cmath>
#include <limits>

namespace epl {

Weight Weight::from_units(double units)
{
    return Weight(std::llround(units * static_cast<double>(kQuantaPerUnit)));
}

Weight Weight::scaled(double factor) const
{
    return Weight(std::llround(static_cast<double>(q_) * factor));
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (hi <= lo)
        return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0) // full 64-bit range
        return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    // Box-Muller; one value per call keeps the stream position simple.
    double u1 = uniform01();
    while (u1 <= 0.0)
        u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

Rng Rng::derive(std::string_view label) const
{
    return Rng(derive_seed(seed_, label));
}

Rng Rng::derive(std::string_view label, std::uint64_t index) const
{
    return Rng(derive_seed(seed_, label, index));
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label)
{
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label, std::uint64_t index)
{
    return splitmix64(splitmix64(parent ^ hash_label(label)) + splitmix64(index));
}

} // namespace epl
