#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "robustdeg/graph.hpp"
#include "robustdeg/rng.hpp"

namespace robustdeg {

/// Samples G(n, d0/n).
///
/// Pairs {i, j}, i < j, are enumerated row-major ((0,1), (0,2), ..., (1,2), ...)
/// and the gaps between successive present pairs are drawn as
/// floor(log(U) / log(1 - p)) with U uniform on (0, 1] from a Xoshiro256
/// stream seeded with `seed`. p = 0 and p = 1 are handled exactly.
inline Graph sample_er(std::size_t n, double d0, std::uint64_t seed) {
  if (!(d0 >= 0.0)) throw std::invalid_argument("sample_er: d0 must be >= 0");
  if (d0 > static_cast<double>(n)) throw std::invalid_argument("sample_er: d0 must be <= n");
  if (n == 0) return Graph::empty(0);
  const double p = d0 / static_cast<double>(n);
  if (p == 0.0) return Graph::empty(n);
  if (p == 1.0) return Graph::complete(n);

  Xoshiro256 rng(seed);
  const double log_q = std::log1p(-p);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0 * 1.1) + 16);

  // (i, j) is the last visited pair; start just before (0, 1).
  std::uint64_t i = 0;
  std::uint64_t j = 0;
  const std::uint64_t nn = n;
  for (;;) {
    const double gap = std::floor(std::log(rng.uniform_open_zero()) / log_q);
    // Advance by gap + 1 pairs, saturating far past the end.
    std::uint64_t step = gap >= 1e18 ? std::uint64_t{1} << 62 : static_cast<std::uint64_t>(gap) + 1;
    while (step > 0) {
      const std::uint64_t room = nn - 1 - j;  // pairs left in row i after j
      if (step <= room) {
        j += step;
        step = 0;
      } else {
        step -= room;
        ++i;
        if (i + 1 >= nn) return Graph::from_sorted_edges(n, edges);
        j = i;  // next pair in the new row is (i, i + 1)
      }
    }
    edges.emplace_back(static_cast<Node>(i), static_cast<Node>(j));
  }
}

}  // namespace robustdeg
