#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace leolora::simcore {

using EntityId = std::uint32_t;

/// SplitMix64 finalizer. Stable across platforms; used for seed derivation and keyed mixing.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a purpose tag.
constexpr std::uint64_t hash_tag(std::string_view tag)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Combines values into one 64-bit key; order-sensitive.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value)
{
    return mix64(seed ^ mix64(value));
}

/// Independent random stream keyed by (master_seed, entity, purpose).
///
/// Streams with the same key replay the same sequence. Keys differing in any
/// component produce unrelated sequences, so adding an entity never perturbs
/// the draws of another one.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, EntityId entity, std::string_view purpose)
        : engine_(hash_combine(hash_combine(master_seed, entity), hash_tag(purpose)))
    {
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform draw in [lo, hi); returns lo when the interval is degenerate.
    double uniform(double lo, double hi);

private:
    std::mt19937_64 engine_;
};

} // namespace leolora::simcore
