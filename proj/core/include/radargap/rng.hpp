#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace radargap {

/// Random stream used by every stochastic generator. Each parallel task owns one.
using Rng = std::mt19937_64;

/// One SplitMix64 step; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a of a label.
constexpr std::uint64_t fnv1a(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed-splitting rule: child = splitmix64(parent XOR fnv1a(label)).
///
/// Streams are derived from the master seed by chaining labels, e.g.
/// `derive_seed(derive_seed(derive_seed(master, scenario), model), "sensor")`.
/// A stream depends only on its own label chain, so adding or removing a model
/// leaves every other model's stream untouched.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
  return splitmix64(parent ^ fnv1a(label));
}

}  // namespace radargap
