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

#ifndef PLSCAN_TEST_FIXTURES_HPP
#define PLSCAN_TEST_FIXTURES_HPP

#include <cmath>
#include <random>
#include <vector>

#include "plscan/geometry.hpp"
#include "plscan/homology.hpp"
#include "plscan/landscape.hpp"

namespace plscan::fixtures {

inline double uniform(std::mt19937_64 &rng, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline PointCloud random_cloud(std::mt19937_64 &rng, std::size_t n, std::size_t dim) {
  std::vector<double> coords(n * dim);
  for (double &c : coords)
    c = uniform(rng);
  return PointCloud(std::move(coords), dim);
}

inline PointCloud unit_square() { return PointCloud({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

inline PointCloud equilateral_triangle() {
  return PointCloud({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}});
}

/// Random finite tents with birth in [0, 10) and length in (0, 5].
inline std::vector<Tent> random_tents(std::mt19937_64 &rng, std::size_t count) {
  std::vector<Tent> tents;
  for (std::size_t i = 0; i < count; ++i) {
    const double b = uniform(rng, 0.0, 10.0);
    tents.push_back({b, b + uniform(rng, 1e-3, 5.0)});
  }
  return tents;
}

inline PersistenceDiagram diagram_of(const std::vector<Tent> &tents, int dim = 1) {
  PersistenceDiagram d;
  for (const auto &t : tents)
    d.intervals.push_back({dim, t.birth, t.death});
  return d;
}

} // namespace plscan::fixtures

#endif // PLSCAN_TEST_FIXTURES_HPP
