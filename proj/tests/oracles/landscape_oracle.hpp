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

// Landscape by definition: at each sample x, sort every tent's value and
// take the k-th largest. No breakpoints, no sweep.

#ifndef PLSCAN_TEST_LANDSCAPE_ORACLE_HPP
#define PLSCAN_TEST_LANDSCAPE_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "plscan/landscape.hpp"

namespace plscan::oracle {

/// lambda_k(x), k from 0.
inline double kmax(const std::vector<Tent> &tents, std::size_t k, double x) {
  std::vector<double> values;
  values.reserve(tents.size());
  for (const auto &t : tents)
    values.push_back(tent_eval(t, x));
  if (k >= values.size())
    return 0.0;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end(),
                   std::greater<>());
  return values[k];
}

/// Sum of (d - b)^2 / 4: the total tent area.
inline double tent_area(const std::vector<Tent> &tents) {
  double sum = 0.0;
  for (const auto &t : tents)
    sum += 0.25 * (t.death - t.birth) * (t.death - t.birth);
  return sum;
}

/// Sum over k of (integral of lambda_k^p)^(1/p) by composite Simpson on a
/// uniform grid of `steps` intervals (even) over the tents' support.
inline double quadrature_norm(const std::vector<Tent> &tents, double p, std::size_t steps) {
  if (tents.empty())
    return 0.0;
  double lo = tents.front().birth, hi = tents.front().death;
  for (const auto &t : tents) {
    lo = std::min(lo, t.birth);
    hi = std::max(hi, t.death);
  }
  const double h = (hi - lo) / static_cast<double>(steps);
  double norm = 0.0;
  for (std::size_t k = 0; k < tents.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * std::pow(kmax(tents, k, lo + h * static_cast<double>(i)), p);
    }
    norm += std::pow(sum * h / 3.0, 1.0 / p);
  }
  return norm;
}

} // namespace plscan::oracle

#endif // PLSCAN_TEST_LANDSCAPE_ORACLE_HPP
