#pragma once

#include <cstdint>
#include <random>

namespace bspn {

// All stochastic code draws from a 64-bit Mersenne Twister. Independent streams
// are derived from (seed, stream) through std::seed_seq so that chains, trials
// and per-sample parameter draws never share a sequence.
using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// SplitMix64 finalizer; used to mix seeds with stream ids and content hashes.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Uniform double on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace bspn
