#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "perturbatrix/core.hpp"

namespace perturbatrix {

/// match[i] is the index in the second multiset paired with element i of the first.
struct MultisetPairing {
  std::vector<Index> match;
  double max_distance = 0.0;
  double total_distance = 0.0;
};

inline constexpr Index kGreedyPairingLimit = 8;

namespace detail {

inline std::vector<Index> greedy_pairing(const MatrixR& cost) {
  const Index n = cost.rows();
  std::vector<Index> match(static_cast<size_t>(n), -1);
  std::vector<bool> used_row(static_cast<size_t>(n), false), used_col(static_cast<size_t>(n), false);
  for (Index step = 0; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    Index bi = -1, bj = -1;
    for (Index i = 0; i < n; ++i) {
      if (used_row[static_cast<size_t>(i)]) continue;
      for (Index j = 0; j < n; ++j) {
        if (used_col[static_cast<size_t>(j)]) continue;
        if (bi < 0 || cost(i, j) < best) {
          best = cost(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    match[static_cast<size_t>(bi)] = bj;
    used_row[static_cast<size_t>(bi)] = true;
    used_col[static_cast<size_t>(bj)] = true;
  }
  return match;
}

// Minimum-cost perfect matching, O(n^3) shortest augmenting paths with potentials.
inline std::vector<Index> hungarian(const MatrixR& cost) {
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n + 1), 0.0), v(static_cast<size_t>(n + 1), 0.0);
  std::vector<Index> p(static_cast<size_t>(n + 1), 0), way(static_cast<size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<size_t>(n + 1), false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const Index i0 = p[static_cast<size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> match(static_cast<size_t>(n), -1);
  for (Index j = 1; j <= n; ++j) match[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
  return match;
}

}  // namespace detail

/// Pairs two equal-size multisets of complex numbers: greedy closest-pair for small
/// sizes, optimal assignment (minimum total distance) otherwise.
inline MultisetPairing pair_multisets(const VectorC& a, const VectorC& b) {
  if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "pair_multisets: sizes differ");
  const Index n = a.size();
  MatrixR cost(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) cost(i, j) = std::abs(a(i) - b(j));
  MultisetPairing out;
  out.match = n <= kGreedyPairingLimit ? detail::greedy_pairing(cost) : detail::hungarian(cost);
  for (Index i = 0; i < n; ++i) {
    const double d = cost(i, out.match[static_cast<size_t>(i)]);
    out.max_distance = std::max(out.max_distance, d);
    out.total_distance += d;
  }
  return out;
}

inline double multiset_distance(const VectorC& a, const VectorC& b) { return pair_multisets(a, b).max_distance; }

}  // namespace perturbatrix
