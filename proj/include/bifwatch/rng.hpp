#pragma once

#include <cstdint>
#include <random>

namespace bifwatch {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-unit seeds so that
// results do not depend on how units are scheduled across threads.
std::uint64_t mix64(std::uint64_t x) noexcept;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t unit,
                          std::uint64_t stream = 0) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace bifwatch
