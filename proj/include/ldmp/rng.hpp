#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ldmp {

using Rng = std::mt19937_64;

/// Stream roles. Every run owns one stream per (role, rep, agent) triple.
enum class StreamRole : std::uint64_t {
  Agent = 1,
  Recommender = 2,
  Init = 3,
  Theory = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// seed XOR hash(role, rep, agent). The hash chains splitmix64 over the
/// three coordinates so that neighbouring reps/agents land far apart.
inline std::uint64_t derive_seed(std::uint64_t base_seed, StreamRole role,
                                 std::uint64_t rep, std::uint64_t agent = 0) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(role));
  h = splitmix64(h ^ rep);
  h = splitmix64(h ^ agent);
  return base_seed ^ h;
}

inline Rng make_stream(std::uint64_t base_seed, StreamRole role,
                       std::uint64_t rep, std::uint64_t agent = 0) {
  return Rng(derive_seed(base_seed, role, rep, agent));
}

}  // namespace ldmp
