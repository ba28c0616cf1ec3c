#pragma once
// Reference implementations used only by the tests. They are written
// from the definitions directly and share no code with the library.

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

// Exact N * (total latency) for augmented counts, from the per-edge loads.
inline std::int64_t augmented_cost(std::int64_t N, std::int64_t u, std::int64_t d, std::int64_t c) {
  const std::int64_t top = u + c;     // agents on the upper-left edge
  const std::int64_t bottom = d + c;  // agents on the lower-right edge
  const std::int64_t lu = N + top;              // N * l(up)
  const std::int64_t ld = N + bottom;           // N * l(down)
  const std::int64_t lc = top + bottom;         // N * l(cross)
  return u * lu + d * ld + c * lc;
}

// Exhaustive minimiser over all (u, d, c) with u + d + c = N. Among equal
// costs: more agents up, then more down.
inline std::array<int, 3> brute_optimum(int N) {
  std::array<int, 3> best{-1, -1, -1};
  std::int64_t best_cost = 0;
  for (int u = N; u >= 0; --u)
    for (int d = N - u; d >= 0; --d) {
      const int c = N - u - d;
      const std::int64_t cost = augmented_cost(N, u, d, c);
      if (best[0] < 0 || cost < best_cost) {
        best = {u, d, c};
        best_cost = cost;
      }
    }
  return best;
}

// Enumerates every placement of the free agents. `sets[i]` is a bitmask of
// allowed actions. Returns the counts minimising total cost, ties toward
// more up then more down.
inline std::array<int, 3> brute_assignment(const std::vector<unsigned>& sets) {
  const int N = static_cast<int>(sets.size());
  std::array<int, 3> best{-1, -1, -1};
  std::int64_t best_cost = 0;
  std::array<int, 3> counts{0, 0, 0};
  std::function<void(int)> rec = [&](int i) {
    if (i == N) {
      const std::int64_t cost = augmented_cost(N, counts[0], counts[1], counts[2]);
      const bool better = best[0] < 0 || cost < best_cost ||
                          (cost == best_cost && (counts[0] > best[0] || (counts[0] == best[0] && counts[1] > best[1])));
      if (better) {
        best = counts;
        best_cost = cost;
      }
      return;
    }
    for (int a = 0; a < 3; ++a) {
      if (!((sets[static_cast<std::size_t>(i)] >> a) & 1U)) continue;
      ++counts[static_cast<std::size_t>(a)];
      rec(i + 1);
      --counts[static_cast<std::size_t>(a)];
    }
  };
  rec(0);
  return best;
}

// q + alpha * (r + gamma * next_max - q)
inline double bellman(double q, double alpha, double gamma, double r, double next_max) {
  return q + alpha * (r + gamma * next_max - q);
}

// Index of the first maximum in a plain row.
inline int first_argmax(const std::vector<double>& row) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a)
    if (row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(best)]) best = a;
  return best;
}

// Number of distinct joint action profiles induced by trying every
// recommendation vector. tables[i][s] is agent i's row s.
inline std::uint64_t brute_profile_count(const std::vector<std::vector<std::vector<double>>>& tables) {
  const int n = static_cast<int>(tables.size());
  const int m = static_cast<int>(tables.front().size());
  std::set<std::vector<int>> profiles;
  std::vector<int> recs(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<int> profile;
    for (int i = 0; i < n; ++i)
      profile.push_back(first_argmax(tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(recs[static_cast<std::size_t>(i)])]));
    profiles.insert(profile);
    int pos = 0;
    while (pos < n && ++recs[static_cast<std::size_t>(pos)] == m) recs[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }
  return profiles.size();
}

}  // namespace oracle
