#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace zsreg {

// mt19937_64 output is fixed by the standard; the std:: distributions are not,
// so the helpers below map raw engine output to values themselves.
using Rng = std::mt19937_64;

/// Mixes a stream id into a base seed (splitmix64 finalizer). Used to give every
/// sub-model, fold and dataset its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

/// Order-sensitive 64-bit hash of a sequence of doubles (bit patterns), seeded.
std::uint64_t hash_values(std::span<const double> values, std::uint64_t seed) noexcept;

/// FNV-1a over raw bytes; stable across platforms.
std::uint64_t fnv1a(std::span<const char> bytes) noexcept;

}  // namespace zsreg
