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

// Reference EMA / EMVar in long double. EMA uses the unrolled weighted sum
//   EMA_n = (1-a)^(n-1) Y_1 + sum_{j=2..n} a (1-a)^(n-j) Y_j
// and EMVar the expanded recursion (1-a) V + a (1-a) d^2.

#ifndef PLSCAN_TEST_EMA_ORACLE_HPP
#define PLSCAN_TEST_EMA_ORACLE_HPP

#include <cmath>
#include <optional>
#include <vector>

namespace plscan::oracle {

struct EmaReference {
  std::vector<long double> ema, emvar;
  std::vector<std::optional<long double>> z;
};

inline EmaReference ema_reference(const std::vector<double> &y, double alpha_in) {
  const long double a = alpha_in;
  EmaReference r;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    long double ema = std::pow(1.0L - a, static_cast<long double>(i)) * y[0];
    for (std::size_t j = 1; j <= i; ++j)
      ema += a * std::pow(1.0L - a, static_cast<long double>(i - j)) * y[j];
    r.ema.push_back(ema);
    if (i == 0) {
      r.emvar.push_back(0.0L);
      r.z.emplace_back();
      continue;
    }
    const long double d = y[i] - r.ema[i - 1];
    r.emvar.push_back((1.0L - a) * r.emvar[i - 1] + a * (1.0L - a) * d * d);
    if (r.emvar[i - 1] > 0.0L)
      r.z.emplace_back(d / std::sqrt(r.emvar[i - 1]));
    else
      r.z.emplace_back();
  }
  return r;
}

} // namespace plscan::oracle

#endif // PLSCAN_TEST_EMA_ORACLE_HPP
