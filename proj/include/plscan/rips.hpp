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

#ifndef PLSCAN_RIPS_HPP
#define PLSCAN_RIPS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "plscan/error.hpp"
#include "plscan/geometry.hpp"

namespace plscan {

using Vertex = std::uint32_t;
using VertexList = std::vector<Vertex>;

/// A simplex tagged with the scale at which it enters the Rips filtration,
/// namely its diameter.
struct FilteredSimplex {
  VertexList vertices; // strictly increasing
  double value = 0.0;

  int dim() const noexcept { return static_cast<int>(vertices.size()) - 1; }

  friend bool operator==(const FilteredSimplex &, const FilteredSimplex &) = default;
};

/// Reduction order: (value, dim, lexicographic vertices).
inline bool filtration_less(const FilteredSimplex &a, const FilteredSimplex &b) {
  if (a.value != b.value)
    return a.value < b.value;
  if (a.vertices.size() != b.vertices.size())
    return a.vertices.size() < b.vertices.size();
  return a.vertices < b.vertices;
}

struct Filtration {
  std::vector<FilteredSimplex> simplices;
  int max_dim = 0;
  std::size_t vertex_count = 0;
  /// The requested dimension reached n - 1, so the complex is the full
  /// simplex and homology is known in every dimension.
  bool clamped = false;
};

namespace detail {

inline void expand_cofaces(const DistanceMatrix &dist, int max_dim,
                           double threshold, VertexList &current,
                           double diameter, std::vector<FilteredSimplex> &out) {
  out.push_back({current, diameter});
  if (static_cast<int>(current.size()) - 1 >= max_dim)
    return;
  const std::size_t n = dist.size();
  for (std::size_t v = current.back() + 1; v < n; ++v) {
    double extended = diameter;
    for (Vertex u : current)
      extended = std::max(extended, dist(u, v));
    if (extended > threshold)
      continue;
    current.push_back(static_cast<Vertex>(v));
    expand_cofaces(dist, max_dim, threshold, current, extended, out);
    current.pop_back();
  }
}

} // namespace detail

/// All simplices of dimension <= max_dim with diameter <= threshold (every
/// simplex when no threshold is given), sorted in reduction order.
/// max_dim above n - 1 is clamped.
inline Filtration build_filtration(const DistanceMatrix &dist, int max_dim,
                                   std::optional<double> threshold = std::nullopt) {
  if (max_dim < 0)
    throw DomainError("max_dim must be non-negative");
  if (threshold && !(*threshold >= 0.0))
    throw DomainError("threshold must be non-negative");
  const std::size_t n = dist.size();
  Filtration filt;
  filt.vertex_count = n;
  if (n == 0)
    return filt;
  filt.max_dim = std::min(max_dim, static_cast<int>(n) - 1);
  filt.clamped = max_dim >= static_cast<int>(n) - 1;
  const double cap = threshold.value_or(std::numeric_limits<double>::infinity());

  // Depth-first generation visits vertex lists in lexicographic order, so
  // the generation index breaks (value, dim) ties exactly as filtration_less.
  std::vector<FilteredSimplex> generated;
  VertexList current;
  current.reserve(static_cast<std::size_t>(filt.max_dim) + 1);
  for (std::size_t v = 0; v < n; ++v) {
    current.assign(1, static_cast<Vertex>(v));
    detail::expand_cofaces(dist, filt.max_dim, cap, current, 0.0, generated);
  }

  struct SortKey {
    double value;
    std::uint32_t dim;
    std::uint32_t index;
  };
  std::vector<SortKey> keys(generated.size());
  for (std::size_t i = 0; i < generated.size(); ++i)
    keys[i] = {generated[i].value, static_cast<std::uint32_t>(generated[i].dim()),
               static_cast<std::uint32_t>(i)};
  std::sort(keys.begin(), keys.end(), [](const SortKey &a, const SortKey &b) {
    if (a.value != b.value)
      return a.value < b.value;
    if (a.dim != b.dim)
      return a.dim < b.dim;
    return a.index < b.index;
  });
  filt.simplices.reserve(generated.size());
  for (const SortKey &k : keys)
    filt.simplices.push_back(std::move(generated[k.index]));
  return filt;
}

inline Filtration build_filtration(const PointCloud &cloud, int max_dim,
                                   std::optional<double> threshold = std::nullopt) {
  return build_filtration(distance_matrix(cloud), max_dim, threshold);
}

} // namespace plscan

#endif // PLSCAN_RIPS_HPP
