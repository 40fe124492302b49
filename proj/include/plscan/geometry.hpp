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

#ifndef PLSCAN_GEOMETRY_HPP
#define PLSCAN_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plscan/error.hpp"

namespace plscan {

/// A finite set of points in R^d, stored row-major.
class PointCloud {
public:
  PointCloud() = default;

  /// Flat row-major coordinates; size must be a multiple of dim.
  PointCloud(std::vector<double> coords, std::size_t dim)
      : coords_(std::move(coords)), dim_(dim) {
    if (dim_ == 0)
      throw StructuralError("point cloud dimension must be positive");
    if (coords_.size() % dim_ != 0)
      throw StructuralError("coordinate count is not a multiple of the dimension");
  }

  explicit PointCloud(const std::vector<std::vector<double>> &points) {
    if (points.empty())
      return;
    dim_ = points.front().size();
    if (dim_ == 0)
      throw StructuralError("point cloud dimension must be positive");
    coords_.reserve(points.size() * dim_);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != dim_)
        throw StructuralError("point " + std::to_string(i) + " has dimension " +
                              std::to_string(points[i].size()) + ", expected " +
                              std::to_string(dim_));
      coords_.insert(coords_.end(), points[i].begin(), points[i].end());
    }
  }

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }

  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const PointCloud &, const PointCloud &) = default;

private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
};

/// Dense symmetric matrix of pairwise distances. Full storage; the windows
/// this is built for hold at most a few hundred points.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * n_ + j];
  }

  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) noexcept {
    entries_[i * n_ + j] = value;
    entries_[j * n_ + i] = value;
  }

private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

template <typename Scalar>
Scalar euclidean_distance(std::span<const Scalar> a, std::span<const Scalar> b) {
  if (a.size() != b.size())
    throw StructuralError("points have different dimensions");
  Scalar sum{};
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Scalar diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

inline DistanceMatrix distance_matrix(const PointCloud &cloud) {
  if (cloud.empty())
    throw StructuralError("distance matrix of an empty point cloud");
  const std::size_t n = cloud.size();
  DistanceMatrix dist(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist.set(i, j, euclidean_distance(cloud[i], cloud[j]));
  return dist;
}

} // namespace plscan

#endif // PLSCAN_GEOMETRY_HPP
