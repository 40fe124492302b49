/*
 *  Copyright (C) 2026 The plscan Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

// Rips persistence straight from a distance matrix, without materializing
// the filtration: union-find for dimension 0, then persistent cohomology
// (coboundary columns reduced in reverse filtration order) for dimensions
// 1 .. max_dim - 1. Simplices are (diameter, combinatorial index) pairs.
//
// Produces the same diagram as compute_persistence(build_filtration(...)).

#ifndef PLSCAN_COHOMOLOGY_HPP
#define PLSCAN_COHOMOLOGY_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "plscan/error.hpp"
#include "plscan/geometry.hpp"
#include "plscan/homology.hpp"

namespace plscan {

namespace detail {

/// A simplex of fixed dimension: filtration value and colex index.
struct IndexedSimplex {
  double diam = 0.0;
  std::uint64_t index = 0;
};

/// Filtration order within one dimension.
inline bool earlier(const IndexedSimplex &a, const IndexedSimplex &b) noexcept {
  return a.diam < b.diam || (a.diam == b.diam && a.index < b.index);
}

class Binomials {
public:
  Binomials(std::size_t n, std::size_t k) : k_(k + 1), table_((n + 1) * k_, 0) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i <= n; ++i) {
      table_[i * k_] = 1;
      for (std::size_t j = 1; j <= std::min(i, k); ++j) {
        const std::uint64_t a = table_[(i - 1) * k_ + j - 1];
        const std::uint64_t b = j < i ? table_[(i - 1) * k_ + j] : 0;
        if (a > kMax - b)
          throw StructuralError("simplex index overflow");
        table_[i * k_ + j] = a + b;
      }
    }
  }

  std::uint64_t operator()(std::size_t n, std::size_t k) const noexcept {
    return k < k_ ? table_[n * k_ + k] : 0;
  }

private:
  std::size_t k_;
  std::vector<std::uint64_t> table_;
};

/// Pivot owner per coface index; a flat table when the index space is small.
class PivotTable {
public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  explicit PivotTable(std::uint64_t key_space) {
    if (key_space <= (std::uint64_t{1} << 22))
      flat_.assign(static_cast<std::size_t>(key_space), kNone);
  }

  std::uint32_t find(std::uint64_t key) const {
    if (!flat_.empty())
      return flat_[static_cast<std::size_t>(key)];
    auto it = map_.find(key);
    return it == map_.end() ? kNone : it->second;
  }

  void insert(std::uint64_t key, std::uint32_t value) {
    if (!flat_.empty())
      flat_[static_cast<std::size_t>(key)] = value;
    else
      map_.emplace(key, value);
  }

private:
  std::vector<std::uint32_t> flat_;
  std::unordered_map<std::uint64_t, std::uint32_t> map_;
};

class CoboundaryReducer {
public:
  CoboundaryReducer(const DistanceMatrix &dist, int max_dim, double cap)
      : dist_(dist), n_(dist.size()), cap_(cap),
        binom_(dist.size(), static_cast<std::size_t>(max_dim) + 1) {}

  /// Vertices of a dim-simplex, ascending.
  void decode(std::uint64_t index, int dim, std::vector<Vertex> &out) const {
    out.resize(static_cast<std::size_t>(dim) + 1);
    std::size_t v = n_;
    for (std::size_t k = static_cast<std::size_t>(dim) + 1; k >= 1; --k) {
      do
        --v;
      while (binom_(v, k) > index);
      out[k - 1] = static_cast<Vertex>(v);
      index -= binom_(v, k);
    }
  }

  /// Cofaces of sigma within the cap, unordered.
  void coboundary(const IndexedSimplex &sigma, int dim, std::vector<IndexedSimplex> &out) {
    decode(sigma.index, dim, vertices_);
    out.clear();
    const std::size_t k = vertices_.size();
    // Colex index of sigma with u inserted: vertices above u move up one
    // position. Walk u downward, keeping the sum for vertices above u.
    std::uint64_t above = 0; // contribution of vertices > u, shifted
    std::uint64_t below = sigma.index;
    std::size_t pos = k; // vertices_[pos..] are above u
    for (std::size_t u = n_; u-- > 0;) {
      while (pos > 0 && vertices_[pos - 1] > u) {
        --pos;
        const Vertex w = vertices_[pos];
        below -= binom_(w, pos + 1);
        above += binom_(w, pos + 2);
      }
      if (pos > 0 && vertices_[pos - 1] == u)
        continue;
      double diam = sigma.diam;
      for (Vertex w : vertices_)
        diam = std::max(diam, dist_(u, w));
      if (diam > cap_)
        continue;
      out.push_back({diam, above + binom_(u, pos + 1) + below});
    }
  }

  /// Every dim-simplex within the cap, in filtration order.
  std::vector<IndexedSimplex> simplices(int dim) {
    std::vector<IndexedSimplex> out;
    std::vector<Vertex> chosen;
    enumerate(static_cast<std::size_t>(dim) + 1, n_, 0.0, 0, chosen, out);
    std::sort(out.begin(), out.end(), earlier);
    return out;
  }

  std::uint64_t key_space(int dim) const {
    return binom_(n_, static_cast<std::size_t>(dim) + 1);
  }

private:
  // Chooses the remaining `k` vertices below `limit`, largest first.
  void enumerate(std::size_t k, std::size_t limit, double diam, std::uint64_t index,
                 std::vector<Vertex> &chosen, std::vector<IndexedSimplex> &out) {
    if (k == 0) {
      out.push_back({diam, index});
      return;
    }
    for (std::size_t v = k - 1; v < limit; ++v) {
      double d = diam;
      for (Vertex w : chosen)
        d = std::max(d, dist_(v, w));
      if (d > cap_)
        continue;
      chosen.push_back(static_cast<Vertex>(v));
      enumerate(k - 1, v, d, index + binom_(v, k), chosen, out);
      chosen.pop_back();
    }
  }

  const DistanceMatrix &dist_;
  std::size_t n_;
  double cap_;
  Binomials binom_;
  std::vector<Vertex> vertices_;
};

/// Symmetric difference of two columns sorted in filtration order.
inline void add_column(std::vector<IndexedSimplex> &target, const std::vector<IndexedSimplex> &src,
                       std::vector<IndexedSimplex> &scratch) {
  scratch.clear();
  auto a = target.cbegin();
  auto b = src.cbegin();
  while (a != target.cend() && b != src.cend()) {
    if (a->index == b->index) {
      ++a;
      ++b;
    } else if (earlier(*a, *b)) {
      scratch.push_back(*a++);
    } else {
      scratch.push_back(*b++);
    }
  }
  scratch.insert(scratch.end(), a, target.cend());
  scratch.insert(scratch.end(), b, src.cend());
  target.swap(scratch);
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  }

  std::vector<std::size_t> parent;
};

} // namespace detail

/// Persistence diagram of the Vietoris-Rips filtration of `dist` up to
/// simplices of dimension max_dim, equal to
/// compute_persistence(build_filtration(dist, max_dim, threshold)).
inline PersistenceDiagram rips_persistence(const DistanceMatrix &dist, int max_dim,
                                           std::optional<double> threshold = std::nullopt) {
  if (max_dim < 0)
    throw DomainError("max_dim must be non-negative");
  if (threshold && !(*threshold >= 0.0))
    throw DomainError("threshold must be non-negative");
  PersistenceDiagram diag;
  const std::size_t n = dist.size();
  if (n == 0)
    return diag;
  const bool clamped = max_dim >= static_cast<int>(n) - 1;
  const int top = std::min(max_dim, static_cast<int>(n) - 1);
  const double cap = threshold.value_or(kInfinity);
  if (top == 0) {
    if (clamped)
      diag.intervals.push_back({0, 0.0, kInfinity});
    return diag;
  }

  detail::CoboundaryReducer reducer(dist, top, cap);
  using detail::IndexedSimplex;

  // Dimension 0: edges in filtration order; merging edges are the deaths.
  std::vector<IndexedSimplex> edges = reducer.simplices(1);
  detail::PivotTable cleared(reducer.key_space(1));
  {
    detail::DisjointSets sets(n);
    std::vector<Vertex> ends;
    std::size_t components = n;
    for (const auto &e : edges) {
      reducer.decode(e.index, 1, ends);
      const std::size_t a = sets.find(ends[0]), b = sets.find(ends[1]);
      if (a == b)
        continue;
      sets.parent[std::max(a, b)] = std::min(a, b);
      --components;
      cleared.insert(e.index, 0);
      if (e.diam > 0.0)
        diag.intervals.push_back({0, 0.0, e.diam});
    }
    for (std::size_t c = 0; c < components; ++c)
      diag.intervals.push_back({0, 0.0, kInfinity});
  }

  // Dimensions 1 .. top - 1: reduce coboundaries, youngest column first.
  // Most columns keep their own coboundary, so only the pivot is found up
  // front; the sorted column is built when a later column runs into it.
  std::vector<IndexedSimplex> columns = std::move(edges);
  std::vector<IndexedSimplex> working, scratch;
  for (int d = 1; d < top; ++d) {
    detail::PivotTable pivots(reducer.key_space(d + 1));
    std::vector<IndexedSimplex> owners;
    std::vector<std::vector<IndexedSimplex>> stored; // empty: owner's coboundary
    auto stored_column = [&](std::uint32_t slot) -> const std::vector<IndexedSimplex> & {
      if (stored[slot].empty()) {
        reducer.coboundary(owners[slot], d, stored[slot]);
        std::sort(stored[slot].begin(), stored[slot].end(), detail::earlier);
      }
      return stored[slot];
    };
    for (auto it = columns.rbegin(); it != columns.rend(); ++it) {
      const IndexedSimplex &sigma = *it;
      if (cleared.find(sigma.index) != detail::PivotTable::kNone)
        continue;
      reducer.coboundary(sigma, d, working);
      if (working.empty()) {
        diag.intervals.push_back({d, sigma.diam, kInfinity});
        continue;
      }
      IndexedSimplex pivot = *std::min_element(working.begin(), working.end(), detail::earlier);
      bool reduced = false;
      for (;;) {
        const std::uint32_t owner = pivots.find(pivot.index);
        if (owner == detail::PivotTable::kNone) {
          pivots.insert(pivot.index, static_cast<std::uint32_t>(owners.size()));
          owners.push_back(sigma);
          stored.emplace_back();
          if (reduced)
            stored.back() = working;
          if (sigma.diam < pivot.diam)
            diag.intervals.push_back({d, sigma.diam, pivot.diam});
          break;
        }
        if (!reduced) {
          std::sort(working.begin(), working.end(), detail::earlier);
          reduced = true;
        }
        detail::add_column(working, stored_column(owner), scratch);
        if (working.empty()) {
          diag.intervals.push_back({d, sigma.diam, kInfinity});
          break;
        }
        pivot = working.front();
      }
    }
    if (d + 1 < top)
      columns = reducer.simplices(d + 1);
    cleared = std::move(pivots);
  }

  std::sort(diag.intervals.begin(), diag.intervals.end());
  return diag;
}

inline PersistenceDiagram rips_persistence(const PointCloud &cloud, int max_dim,
                                           std::optional<double> threshold = std::nullopt) {
  return rips_persistence(distance_matrix(cloud), max_dim, threshold);
}

enum class PersistenceEngine { cohomology, boundary };

/// Rips persistence of a point cloud with the chosen backend.
inline PersistenceDiagram rips_diagram(const PointCloud &cloud, int max_dim,
                                       std::optional<double> threshold,
                                       PersistenceEngine engine = PersistenceEngine::cohomology) {
  if (engine == PersistenceEngine::boundary)
    return compute_persistence(build_filtration(distance_matrix(cloud), max_dim, threshold));
  return rips_persistence(distance_matrix(cloud), max_dim, threshold);
}

} // namespace plscan

#endif // PLSCAN_COHOMOLOGY_HPP
