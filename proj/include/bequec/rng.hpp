#pragma once

#include <cstdint>
#include <random>

namespace bequec::rng {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Child seed for an independent stream, e.g. derive(seed, trial) or derive(trial_seed, stage).
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

/// Uniform [0,1) value addressed by (seed, a, b). Counter based, so any thread
/// can draw entry (a,b) without touching shared state.
inline double uniform_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(a * 0xD1B54A32D192ED03ull + b));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Coin for the unordered pair {i,j}; symmetric in its arguments.
inline double pair_uniform(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  return i < j ? uniform_at(seed, i, j) : uniform_at(seed, j, i);
}

}  // namespace bequec::rng
