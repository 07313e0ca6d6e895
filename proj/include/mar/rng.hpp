#pragma once

#include <cstdint>
#include <random>

namespace mar {

/// splitmix64 finalizer; used to derive independent per-row seed streams.
inline uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

/// Deterministic Poisson sampler: sequential-search inversion for small
/// means, Hormann's PTRS transformed rejection for large means. Depends only
/// on the mt19937_64 bit stream, so results are reproducible everywhere.
uint64_t poisson_sample(std::mt19937_64& rng, double mean);

}  // namespace mar
