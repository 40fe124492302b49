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

#ifndef PLSCAN_SERIES_HPP
#define PLSCAN_SERIES_HPP

#include <string>
#include <vector>

#include "plscan/error.hpp"
#include "plscan/timestamp.hpp"

namespace plscan {

/// One closing price at one minute.
struct BarRecord {
  Timestamp timestamp;
  double close = 0.0;

  friend bool operator==(const BarRecord &, const BarRecord &) = default;
};

struct InstrumentBars {
  std::string name;
  std::vector<BarRecord> bars;
};

/// Closing prices of several instruments on a common minute grid.
struct AlignedSeries {
  std::vector<std::string> instruments;
  std::vector<Timestamp> timestamps;
  std::vector<std::vector<double>> closes; // [instrument][row]

  std::size_t rows() const noexcept { return timestamps.size(); }
  std::size_t width() const noexcept { return closes.size(); }

  void validate() const {
    if (closes.empty())
      throw StructuralError("aligned series has no instruments");
    if (!instruments.empty() && instruments.size() != closes.size())
      throw StructuralError("instrument names do not match price columns");
    for (const auto &col : closes)
      if (col.size() != timestamps.size())
        throw StructuralError("price column length differs from timestamp count");
    for (std::size_t i = 1; i < timestamps.size(); ++i)
      if (!(timestamps[i - 1] < timestamps[i]))
        throw StructuralError("aligned timestamps are not strictly increasing at row " +
                              std::to_string(i));
  }

  /// Rows [begin, end) as a new series.
  AlignedSeries slice(std::size_t begin, std::size_t end) const {
    AlignedSeries out;
    out.instruments = instruments;
    out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                          timestamps.begin() + static_cast<std::ptrdiff_t>(end));
    for (const auto &col : closes)
      out.closes.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(begin),
                              col.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
  }

  friend bool operator==(const AlignedSeries &, const AlignedSeries &) = default;
};

} // namespace plscan

#endif // PLSCAN_SERIES_HPP
