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

#ifndef PLSCAN_HOMOLOGY_HPP
#define PLSCAN_HOMOLOGY_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "plscan/error.hpp"
#include "plscan/rips.hpp"

namespace plscan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistenceInterval {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  bool essential() const noexcept { return std::isinf(death); }
  double persistence() const noexcept { return death - birth; }

  friend bool operator==(const PersistenceInterval &, const PersistenceInterval &) = default;
  friend auto operator<=>(const PersistenceInterval &, const PersistenceInterval &) = default;
};

/// Multiset of intervals, kept sorted by (dim, birth, death).
struct PersistenceDiagram {
  std::vector<PersistenceInterval> intervals;

  std::vector<PersistenceInterval> in_dim(int dim) const {
    std::vector<PersistenceInterval> out;
    for (const auto &iv : intervals)
      if (iv.dim == dim)
        out.push_back(iv);
    return out;
  }

  std::size_t essential_count(int dim) const {
    return static_cast<std::size_t>(std::count_if(
        intervals.begin(), intervals.end(),
        [dim](const PersistenceInterval &iv) { return iv.dim == dim && iv.essential(); }));
  }

  friend bool operator==(const PersistenceDiagram &, const PersistenceDiagram &) = default;
};

enum class ColumnStorage {
  automatic, ///< Dense bitsets when they fit in memory, sparse otherwise.
  sparse,
  dense,
};

struct PersistenceOptions {
  /// Reduce from the top dimension down and skip columns already known to
  /// be positive. Output is identical either way.
  bool clearing = true;
  ColumnStorage storage = ColumnStorage::automatic;
};

namespace detail {

// Combinatorial number system: a k-subset {v0 < v1 < ... } maps to
// sum C(v_i, i + 1), a bijection onto [0, C(n, k)).
class SimplexIndexer {
public:
  SimplexIndexer(std::size_t n, int max_dim)
      : width_(static_cast<std::size_t>(max_dim) + 2), binom_((n + 1) * width_, 0) {
    for (std::size_t v = 0; v <= n; ++v) {
      binom_[v * width_] = 1;
      if (v == 0)
        continue;
      for (std::size_t k = 1; k < width_; ++k) {
        const std::uint64_t a = binom_[(v - 1) * width_ + k - 1];
        const std::uint64_t b = binom_[(v - 1) * width_ + k];
        if (a > std::numeric_limits<std::uint64_t>::max() - b)
          throw StructuralError("filtration too large to index simplices");
        binom_[v * width_ + k] = a + b;
      }
    }
  }

  /// Key of the vertex set with position `skip` removed (SIZE_MAX: none).
  std::uint64_t key(const VertexList &vertices, std::size_t skip = SIZE_MAX) const {
    std::uint64_t k = 0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i == skip)
        continue;
      ++pos;
      k += binom_[static_cast<std::size_t>(vertices[i]) * width_ + pos];
    }
    return k;
  }

  /// Number of distinct keys for simplices with `size` vertices on n vertices.
  std::uint64_t key_space(std::size_t n, std::size_t size) const {
    return binom_[n * width_ + size];
  }

private:
  std::size_t width_;
  std::vector<std::uint64_t> binom_;
};

// Maps a simplex key to its position within its dimension. Dense table when
// the key space is small relative to the simplex count, hash map otherwise.
class FaceLookup {
public:
  static constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();

  FaceLookup(std::uint64_t key_space, std::size_t expected) {
    dense_ = key_space <= 8 * static_cast<std::uint64_t>(expected) + 64;
    if (dense_)
      table_.assign(static_cast<std::size_t>(key_space), kMissing);
    else
      map_.reserve(expected);
  }

  void insert(std::uint64_t key, std::uint32_t local) {
    if (dense_)
      table_[static_cast<std::size_t>(key)] = local;
    else
      map_.emplace(key, local);
  }

  std::uint32_t find(std::uint64_t key) const {
    if (dense_)
      return key < table_.size() ? table_[static_cast<std::size_t>(key)] : kMissing;
    auto it = map_.find(key);
    return it == map_.end() ? kMissing : it->second;
  }

private:
  bool dense_ = false;
  std::vector<std::uint32_t> table_;
  std::unordered_map<std::uint64_t, std::uint32_t> map_;
};

inline void validate_simplex(const FilteredSimplex &s, std::size_t index,
                             std::size_t vertex_count, int max_dim) {
  if (s.vertices.empty() || s.dim() > max_dim)
    throw StructuralError("simplex " + std::to_string(index) + " has invalid dimension");
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (s.vertices[i] >= vertex_count)
      throw StructuralError("simplex " + std::to_string(index) + " has an out-of-range vertex");
    if (i > 0 && s.vertices[i - 1] >= s.vertices[i])
      throw StructuralError("simplex " + std::to_string(index) +
                            " vertices are not strictly increasing");
  }
  if (!(s.value >= 0.0) || std::isinf(s.value))
    throw StructuralError("simplex " + std::to_string(index) + " has an invalid value");
}

// Boundary matrix split by dimension. Simplices of each dimension are
// numbered locally in filtration order; the column of a k-simplex holds
// the local numbers of its (k-1)-faces, sorted ascending.
struct GradedBoundary {
  std::vector<std::vector<std::uint32_t>> global; // [dim] local -> filtration index
  std::vector<std::vector<std::uint32_t>> faces;  // [dim] flattened, (dim + 1) per simplex
};

inline GradedBoundary graded_boundary(const Filtration &filt) {
  const auto &simplices = filt.simplices;
  const std::size_t n = filt.vertex_count;
  const auto dims = static_cast<std::size_t>(filt.max_dim) + 1;
  GradedBoundary out;
  out.global.resize(dims);
  out.faces.resize(dims);

  for (std::size_t j = 0; j < simplices.size(); ++j) {
    validate_simplex(simplices[j], j, n, filt.max_dim);
    if (j > 0 && !filtration_less(simplices[j - 1], simplices[j]))
      throw StructuralError("filtration is not sorted at simplex " + std::to_string(j));
    out.global[static_cast<std::size_t>(simplices[j].dim())].push_back(
        static_cast<std::uint32_t>(j));
  }

  SimplexIndexer indexer(n, filt.max_dim);
  std::vector<FaceLookup> lookup;
  lookup.reserve(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    lookup.emplace_back(indexer.key_space(n, d + 1), out.global[d].size());
    for (std::size_t local = 0; local < out.global[d].size(); ++local)
      lookup[d].insert(indexer.key(simplices[out.global[d][local]].vertices),
                       static_cast<std::uint32_t>(local));
  }

  for (std::size_t d = 1; d < dims; ++d) {
    auto &faces = out.faces[d];
    faces.reserve(out.global[d].size() * (d + 1));
    for (std::uint32_t j : out.global[d]) {
      const auto &s = simplices[j];
      const auto begin = faces.size();
      for (std::size_t skip = 0; skip <= d; ++skip) {
        const std::uint32_t face = lookup[d - 1].find(indexer.key(s.vertices, skip));
        if (face == FaceLookup::kMissing)
          throw StructuralError("filtration is missing a face of simplex " + std::to_string(j));
        if (out.global[d - 1][face] > j)
          throw StructuralError("face enters after its coface at simplex " + std::to_string(j));
        faces.push_back(face);
      }
      std::sort(faces.begin() + static_cast<std::ptrdiff_t>(begin), faces.end());
    }
  }
  return out;
}

inline constexpr std::uint32_t kUnpaired = std::numeric_limits<std::uint32_t>::max();

// Sparse Z/2 columns as sorted index vectors.
class SparseReducer {
public:
  explicit SparseReducer(std::size_t rows) : owner_(rows, kUnpaired) {}

  /// Reduces the column with the given faces; returns its pivot row or
  /// kUnpaired if it reduced to zero.
  std::uint32_t reduce(std::span<const std::uint32_t> faces) {
    work_.assign(faces.begin(), faces.end());
    while (!work_.empty()) {
      const std::uint32_t owner = owner_[work_.back()];
      if (owner == kUnpaired)
        break;
      const auto &source = stored_[owner];
      scratch_.clear();
      std::set_symmetric_difference(work_.begin(), work_.end(), source.begin(), source.end(),
                                    std::back_inserter(scratch_));
      work_.swap(scratch_);
    }
    if (work_.empty())
      return kUnpaired;
    const std::uint32_t low = work_.back();
    owner_[low] = static_cast<std::uint32_t>(stored_.size());
    stored_.push_back(work_);
    return low;
  }

private:
  std::vector<std::uint32_t> owner_; // row -> slot in stored_
  std::vector<std::vector<std::uint32_t>> stored_;
  std::vector<std::uint32_t> work_, scratch_;
};

// Dense Z/2 columns as bitsets over the row range. Reduced pivot columns
// are stored packed; only words at or below the pivot word are touched.
class DenseReducer {
public:
  explicit DenseReducer(std::size_t rows)
      : words_((rows + 63) / 64), owner_(rows, kUnpaired), work_(words_, 0) {}

  static bool fits(std::size_t rows) {
    const std::size_t words = (rows + 63) / 64;
    return rows * words * sizeof(std::uint64_t) <= (std::size_t{64} << 20);
  }

  std::uint32_t reduce(std::span<const std::uint32_t> faces) {
    if (faces.empty())
      return kUnpaired;
    std::size_t top = faces.back() / 64;
    std::fill(work_.begin(), work_.begin() + static_cast<std::ptrdiff_t>(top) + 1, 0);
    for (std::uint32_t f : faces)
      work_[f / 64] ^= std::uint64_t{1} << (f % 64);

    for (;;) {
      while (work_[top] == 0) {
        if (top == 0)
          return kUnpaired;
        --top;
      }
      const auto low = static_cast<std::uint32_t>(top * 64 + 63 - std::countl_zero(work_[top]));
      const std::uint32_t owner = owner_[low];
      if (owner == kUnpaired) {
        owner_[low] = static_cast<std::uint32_t>(stored_.size() / words_);
        stored_.insert(stored_.end(), work_.begin(), work_.begin() + static_cast<std::ptrdiff_t>(top) + 1);
        stored_.resize(stored_.size() + (words_ - top - 1), 0);
        return low;
      }
      const std::uint64_t *source = stored_.data() + static_cast<std::size_t>(owner) * words_;
      for (std::size_t w = 0; w <= top; ++w)
        work_[w] ^= source[w];
    }
  }

private:
  std::size_t words_;
  std::vector<std::uint32_t> owner_;
  std::vector<std::uint64_t> stored_;
  std::vector<std::uint64_t> work_;
};

// Reduces every column of dimension `dim`, skipping those flagged in
// `skip`. Records pivots into `pivot_of` (local column -> local row).
template <typename Reducer>
void reduce_dimension(const GradedBoundary &boundary, std::size_t dim,
                      const std::vector<bool> &skip, std::vector<std::uint32_t> &pivot_of) {
  const auto &faces = boundary.faces[dim];
  const std::size_t columns = boundary.global[dim].size();
  Reducer reducer(boundary.global[dim - 1].size());
  pivot_of.assign(columns, kUnpaired);
  for (std::size_t c = 0; c < columns; ++c) {
    if (!skip.empty() && skip[c])
      continue;
    pivot_of[c] = reducer.reduce(std::span(faces).subspan(c * (dim + 1), dim + 1));
  }
}

} // namespace detail

/// Persistence pairing of the filtration's boundary matrix over Z/2.
/// Zero-length intervals are dropped; unpaired simplices below the top
/// dimension (or in any dimension of a clamped filtration) become essential
/// intervals.
inline PersistenceDiagram compute_persistence(const Filtration &filt,
                                              PersistenceOptions options = {}) {
  using detail::kUnpaired;
  const auto &simplices = filt.simplices;
  if (simplices.size() >= kUnpaired)
    throw StructuralError("filtration too large");

  const detail::GradedBoundary boundary = detail::graded_boundary(filt);
  const auto dims = static_cast<std::size_t>(filt.max_dim) + 1;

  // pivots[d][c]: local row in dim d - 1 paired with local column c of dim d.
  std::vector<std::vector<std::uint32_t>> pivots(dims);
  // paired_row[d][r]: simplex r of dim d is the pivot of some column above.
  std::vector<std::vector<bool>> paired_row(dims);
  for (std::size_t d = 0; d < dims; ++d)
    paired_row[d].assign(boundary.global[d].size(), false);

  for (std::size_t d = dims - 1; d >= 1; --d) {
    const std::size_t rows = boundary.global[d - 1].size();
    // With clearing, columns already known to be pivot rows of the
    // dimension above are zero after reduction and need no work.
    const std::vector<bool> none;
    const std::vector<bool> &skip = options.clearing ? paired_row[d] : none;
    bool dense = false;
    switch (options.storage) {
    case ColumnStorage::automatic: dense = detail::DenseReducer::fits(rows); break;
    case ColumnStorage::dense: dense = true; break;
    case ColumnStorage::sparse: dense = false; break;
    }
    if (dense)
      detail::reduce_dimension<detail::DenseReducer>(boundary, d, skip, pivots[d]);
    else
      detail::reduce_dimension<detail::SparseReducer>(boundary, d, skip, pivots[d]);
    for (std::uint32_t row : pivots[d])
      if (row != kUnpaired)
        paired_row[d - 1][row] = true;
  }

  PersistenceDiagram diag;
  for (std::size_t d = 0; d < dims; ++d) {
    const auto &global = boundary.global[d];
    for (std::size_t c = 0; c < global.size(); ++c) {
      const auto &s = simplices[global[c]];
      if (d >= 1 && pivots[d][c] != kUnpaired) {
        // Negative simplex: closes the interval born at its pivot.
        const double birth = simplices[boundary.global[d - 1][pivots[d][c]]].value;
        if (birth < s.value)
          diag.intervals.push_back({static_cast<int>(d) - 1, birth, s.value});
      } else if (!paired_row[d][c] && (d + 1 < dims || filt.clamped)) {
        // Positive and never killed. Top-dimension cycles are ignored since
        // the simplices that could kill them were not built.
        diag.intervals.push_back({static_cast<int>(d), s.value, kInfinity});
      }
    }
  }
  std::sort(diag.intervals.begin(), diag.intervals.end());
  return diag;
}

} // namespace plscan

#endif // PLSCAN_HOMOLOGY_HPP
