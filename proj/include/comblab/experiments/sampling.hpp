#pragma once

// Counter-based sampling: every draw is a pure function of
// (seed, stream name, index, slot), so evaluation order never matters.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace comblab::experiments {

constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::string_view name) : key_(mix64(mix64(seed) ^ fnv1a(name))) {}

    std::uint64_t bits(std::uint64_t index, std::uint64_t slot) const
    {
        return mix64(key_ ^ mix64(index * 0x2545f4914f6cdd1dULL + slot));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t index, std::uint64_t slot) const
    {
        return static_cast<double>(bits(index, slot) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t index, std::uint64_t slot, double lo, double hi) const
    {
        return lo + (hi - lo) * uniform(index, slot);
    }

    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::uint64_t index, std::uint64_t slot, std::int64_t lo, std::int64_t hi) const
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(bits(index, slot) % span);
    }

private:
    std::uint64_t key_;
};

} // namespace comblab::experiments
