// Deterministic seed derivation and uniform variates.
//
// Replicated runs and sweep points must not share streams, and outputs must
// not depend on the standard library's distribution implementations, so the
// few random quantities the simulator needs (per-flow phase jitter) are drawn
// from a splitmix64 generator with pinned arithmetic.

#pragma once

#include <cstdint>

namespace popaware {

// Finalizer from the splitmix64 reference implementation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent run seed for (sweep point, replication) under a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point, std::uint64_t rep) {
    return splitmix64(splitmix64(base ^ 0xa24baed4963ee407ULL * (point + 1)) ^
                      0x9fb21c651e98df25ULL * (rep + 1));
}

// Uniform double in [0, 1) from the top 53 bits of a mixed 64-bit state.
inline double uniform01(std::uint64_t state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace popaware
