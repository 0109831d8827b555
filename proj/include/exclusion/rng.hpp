#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace excl {

// splitmix64; used only to decorrelate seed material for derived streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed material for the stream `id` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) {
    return splitmix64(splitmix64(seed) ^ splitmix64(~id));
}

// Independent generator for (seed, stream). Replica results depend only on
// these two values, never on thread scheduling.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t s = derive_seed(seed, stream);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// 53-bit uniform in [0,1). Bypasses std::uniform_real_distribution so the
// byte-identical-output contract does not hinge on library internals.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Unbiased uniform draw from {0, ..., n-1}.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do { x = g(); } while (x >= limit);
    return x % n;
}

}  // namespace excl
