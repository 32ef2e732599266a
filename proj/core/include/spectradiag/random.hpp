#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace spectradiag {

using Rng = std::mt19937_64;

/// Independent generator for replicate `stream` of a run seeded with `seed`.
/// Every randomized loop draws replicate i from substream(seed, i), which is
/// what makes results independent of the worker count.
Rng substream(std::uint64_t seed, std::uint64_t stream);

/// Mixes several words into one seed (used to derive per-cell seeds).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// k distinct indices from [0, n) in increasing order.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k);

/// n indices drawn from [0, n) with replacement.
std::vector<std::size_t> resample_indices(Rng& rng, std::size_t n);

}  // namespace spectradiag
