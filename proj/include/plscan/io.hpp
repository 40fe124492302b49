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

#ifndef PLSCAN_IO_HPP
#define PLSCAN_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "plscan/anomaly.hpp"
#include "plscan/error.hpp"
#include "plscan/geometry.hpp"
#include "plscan/homology.hpp"
#include "plscan/landscape.hpp"
#include "plscan/series.hpp"
#include "plscan/timestamp.hpp"

namespace plscan {

// ---------------------------------------------------------------------------
// Text helpers

/// Numeric output format shared by every writer: shortest exact decimal,
/// "inf" for infinity.
inline std::string format_number(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  // Shortest text that parses back to the same double.
  char buf[40];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s == "inf" || s == "+inf" || s == "Inf")
    return kInfinity;
  if (s == "-inf")
    return -kInfinity;
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

inline std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  if (!line.empty() && line.back() == '\r')
    line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    std::string_view f = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t'))
      f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t'))
      f.remove_suffix(1);
    fields.emplace_back(f);
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return fields;
}

namespace detail {

inline std::ifstream open_input(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path);
  return in;
}

inline bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Bar ingestion

enum class TableLayout {
  wide, ///< timestamp column plus one close column per instrument
  long_ ///< timestamp, instrument and close columns, one row per bar
};

struct BarFormat {
  TableLayout layout = TableLayout::wide;
  char delimiter = ',';
  std::string time_column = "timestamp";
  /// Close column for single-instrument and long files.
  std::string close_column = "close";
  std::string instrument_column = "instrument";
  /// Wide files: price columns to use, in order. Empty means every column
  /// other than the time column.
  std::vector<std::string> columns;
  /// Empty: per-field detection (all digits means epoch minutes).
  std::optional<TimeFormat> time_format;
};

namespace detail {

inline Timestamp parse_time_field(const std::string &field, const BarFormat &fmt,
                                  const std::string &where) {
  std::optional<Timestamp> t;
  if (fmt.time_format) {
    t = parse_timestamp(field, *fmt.time_format);
  } else {
    const bool numeric = !field.empty() &&
                         field.find_first_not_of("0123456789-") == std::string::npos;
    t = parse_timestamp(field, numeric ? TimeFormat::epoch : TimeFormat::iso);
  }
  if (!t)
    throw InputError(where + ": unparseable timestamp '" + field + "'");
  return *t;
}

inline double parse_close_field(const std::string &field, const std::string &where) {
  const auto v = parse_number(field);
  if (!v || std::isinf(*v) || std::isnan(*v))
    throw InputError(where + ": unparseable close '" + field + "'");
  if (!(*v > 0.0))
    throw InputError(where + ": close must be positive, got " + field);
  return *v;
}

inline std::size_t column_index(const std::vector<std::string> &header, const std::string &name,
                                const std::string &path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw InputError(path + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

inline void append_bar(std::vector<BarRecord> &bars, BarRecord rec, const std::string &where) {
  if (!bars.empty() && !(bars.back().timestamp < rec.timestamp))
    throw InputError(where + ": timestamp " + to_iso(rec.timestamp) +
                     " is not after the previous one");
  bars.push_back(rec);
}

} // namespace detail

/// Reads a multi-instrument bar table in either layout. In wide files an
/// empty cell means the instrument has no bar at that minute.
inline std::vector<InstrumentBars> read_bar_table(std::istream &in, const BarFormat &fmt,
                                                  const std::string &path = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::blank(line)) {
      header = split_fields(line, fmt.delimiter);
      break;
    }
  }
  if (header.empty())
    throw InputError(path + ": empty file");

  const std::size_t time_col = detail::column_index(header, fmt.time_column, path);
  std::vector<InstrumentBars> out;

  if (fmt.layout == TableLayout::long_) {
    const std::size_t inst_col = detail::column_index(header, fmt.instrument_column, path);
    const std::size_t close_col = detail::column_index(header, fmt.close_column, path);
    std::map<std::string, std::size_t> slot;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::blank(line))
        continue;
      const std::string where = path + ":" + std::to_string(line_no);
      const auto fields = split_fields(line, fmt.delimiter);
      if (fields.size() != header.size())
        throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()));
      const std::string &name = fields[inst_col];
      if (name.empty())
        throw InputError(where + ": empty instrument name");
      auto [it, inserted] = slot.emplace(name, out.size());
      if (inserted)
        out.push_back({name, {}});
      detail::append_bar(out[it->second].bars,
                         {detail::parse_time_field(fields[time_col], fmt, where),
                          detail::parse_close_field(fields[close_col], where)},
                         where);
    }
    if (out.empty())
      throw InputError(path + ": no bars");
    return out;
  }

  std::vector<std::size_t> price_cols;
  if (fmt.columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != time_col)
        price_cols.push_back(c);
  } else {
    for (const auto &name : fmt.columns)
      price_cols.push_back(detail::column_index(header, name, path));
  }
  if (price_cols.empty())
    throw InputError(path + ": no price columns");
  for (std::size_t c : price_cols)
    out.push_back({header[c], {}});

  std::optional<Timestamp> previous;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line))
      continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto fields = split_fields(line, fmt.delimiter);
    if (fields.size() != header.size())
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    const Timestamp t = detail::parse_time_field(fields[time_col], fmt, where);
    if (previous && !(*previous < t))
      throw InputError(where + ": timestamp " + fields[time_col] +
                       " is not after the previous one");
    previous = t;
    for (std::size_t k = 0; k < price_cols.size(); ++k) {
      const std::string &cell = fields[price_cols[k]];
      if (cell.empty())
        continue;
      out[k].bars.push_back({t, detail::parse_close_field(cell, where)});
    }
  }
  if (!previous)
    throw InputError(path + ": no bars");
  return out;
}

inline std::vector<InstrumentBars> read_bar_table(const std::string &path, const BarFormat &fmt) {
  auto in = detail::open_input(path);
  return read_bar_table(in, fmt, path);
}

/// Single-instrument file with fmt.time_column and fmt.close_column.
inline std::vector<BarRecord> read_bars(std::istream &in, const BarFormat &fmt,
                                        const std::string &path = "<input>") {
  BarFormat single = fmt;
  single.layout = TableLayout::wide;
  single.columns = {fmt.close_column};
  auto table = read_bar_table(in, single, path);
  return std::move(table.front().bars);
}

inline std::vector<BarRecord> read_bars(const std::string &path, const BarFormat &fmt) {
  auto in = detail::open_input(path);
  return read_bars(in, fmt, path);
}

// ---------------------------------------------------------------------------
// Alignment

enum class AlignMode { intersection, forward_fill };

struct AlignPolicy {
  AlignMode mode = AlignMode::intersection;
  /// Longest run of consecutive missing minutes (on the union grid) that
  /// forward fill will bridge.
  std::size_t max_gap = 5;
};

/// Puts every instrument on a common grid. Intersection keeps minutes where
/// all instruments have a bar; forward fill also keeps minutes where the
/// missing instruments can carry their last close over a short gap.
inline AlignedSeries align(const std::vector<InstrumentBars> &series, AlignPolicy policy = {}) {
  if (series.empty())
    throw InputError("alignment needs at least one instrument");
  for (const auto &s : series)
    for (std::size_t i = 1; i < s.bars.size(); ++i)
      if (!(s.bars[i - 1].timestamp < s.bars[i].timestamp))
        throw StructuralError("bars of " + s.name + " are not strictly increasing");

  std::vector<Timestamp> grid;
  for (const auto &s : series)
    for (const auto &b : s.bars)
      grid.push_back(b.timestamp);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t width = series.size();
  std::vector<std::vector<std::optional<double>>> filled(width,
                                                         std::vector<std::optional<double>>(grid.size()));
  for (std::size_t i = 0; i < width; ++i) {
    std::size_t b = 0;
    std::optional<double> last;
    std::size_t gap = 0;
    for (std::size_t r = 0; r < grid.size(); ++r) {
      const auto &bars = series[i].bars;
      if (b < bars.size() && bars[b].timestamp == grid[r]) {
        filled[i][r] = bars[b].close;
        last = bars[b].close;
        gap = 0;
        ++b;
      } else if (policy.mode == AlignMode::forward_fill && last) {
        ++gap;
        if (gap <= policy.max_gap)
          filled[i][r] = last;
      }
    }
  }

  AlignedSeries out;
  for (const auto &s : series)
    out.instruments.push_back(s.name);
  out.closes.resize(width);
  for (std::size_t r = 0; r < grid.size(); ++r) {
    bool complete = true;
    for (std::size_t i = 0; i < width && complete; ++i)
      complete = filled[i][r].has_value();
    if (!complete)
      continue;
    out.timestamps.push_back(grid[r]);
    for (std::size_t i = 0; i < width; ++i)
      out.closes[i].push_back(*filled[i][r]);
  }
  if (out.timestamps.empty())
    throw InputError("instruments share no common minutes");
  return out;
}

/// Minutes of the UTC day a trading session keeps: [open, close). When
/// open > close the session wraps past midnight.
struct SessionFilter {
  int open_minute = 0;
  int close_minute = 1440;

  bool contains(Timestamp t) const noexcept {
    const auto m = static_cast<int>(t.minutes - t.day() * Timestamp::kMinutesPerDay);
    return open_minute <= close_minute ? open_minute <= m && m < close_minute
                                       : m >= open_minute || m < close_minute;
  }

  /// "HH:MM-HH:MM"; the close may be 24:00.
  static SessionFilter parse(std::string_view text) {
    auto clock = [&](std::string_view part) {
      const auto h = detail::parse_fixed(part, 0, 2), m = detail::parse_fixed(part, 3, 2);
      if (part.size() != 5 || part[2] != ':' || !h || !m || *m > 59 || *h * 60 + *m > 1440)
        throw InputError("session must look like HH:MM-HH:MM, got " + std::string(text));
      return *h * 60 + *m;
    };
    const auto dash = text.find('-');
    if (dash == std::string_view::npos)
      throw InputError("session must look like HH:MM-HH:MM, got " + std::string(text));
    SessionFilter f{clock(text.substr(0, dash)), clock(text.substr(dash + 1))};
    if (f.open_minute == f.close_minute)
      throw InputError("session is empty: " + std::string(text));
    return f;
  }
};

/// Rows of `series` whose time of day falls inside the session.
inline AlignedSeries filter_session(const AlignedSeries &series, const SessionFilter &session) {
  AlignedSeries out;
  out.instruments = series.instruments;
  out.closes.resize(series.width());
  for (std::size_t r = 0; r < series.rows(); ++r) {
    if (!session.contains(series.timestamps[r]))
      continue;
    out.timestamps.push_back(series.timestamps[r]);
    for (std::size_t i = 0; i < series.width(); ++i)
      out.closes[i].push_back(series.closes[i][r]);
  }
  if (out.timestamps.empty())
    throw InputError("no bars fall inside the session");
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic minute bars

/// V-shaped drawdown: log price falls linearly to ln(1 - depth) at the
/// midpoint and recovers linearly by the end. While it lasts, each
/// instrument also carries independent non-accumulating noise of
/// `turbulence` times the base volatility.
struct ShockSpec {
  std::size_t start_minute = 0; // global minute index (across days)
  double depth_percent = 6.0;
  std::size_t duration_minutes = 36;
  double turbulence = 4.0;
};

struct SynthSpec {
  std::size_t days = 1;
  std::size_t minutes_per_day = 1380;
  std::size_t instruments = 3;
  /// Per-minute log-return standard deviation.
  double volatility = 2e-4;
  /// Pairwise correlation of the instruments' returns, in [0, 1].
  double correlation = 0.8;
  double start_price = 1000.0;
  Timestamp start = *parse_iso_timestamp("2020-01-06T00:00");
  std::optional<ShockSpec> shock;
};

/// Normal variates by the Box-Muller transform over std::mt19937_64, whose
/// output sequence is fixed by the standard; the std:: distributions are
/// implementation-defined and would not reproduce across platforms.
class NormalStream {
public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

private:
  // 53 random bits mapped onto (0, 1].
  double uniform_open_closed() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Seeded correlated geometric random walk of minute closes, optionally
/// with one injected drawdown-and-rebound.
inline AlignedSeries synth_generate(std::uint64_t seed, const SynthSpec &spec) {
  if (spec.instruments == 0 || spec.days == 0 || spec.minutes_per_day == 0)
    throw DomainError("synthetic series needs instruments, days and minutes");
  if (spec.minutes_per_day > static_cast<std::size_t>(Timestamp::kMinutesPerDay))
    throw DomainError("a day has at most 1440 minutes");
  if (!(spec.volatility >= 0.0) || !(spec.correlation >= 0.0 && spec.correlation <= 1.0) ||
      !(spec.start_price > 0.0))
    throw DomainError("invalid synthetic volatility, correlation or start price");
  if (spec.shock && !(spec.shock->depth_percent >= 0.0 && spec.shock->depth_percent < 100.0))
    throw DomainError("shock depth must be in [0, 100) percent");

  NormalStream normal(seed);
  const double common = std::sqrt(spec.correlation);
  const double own = std::sqrt(1.0 - spec.correlation);

  AlignedSeries out;
  for (std::size_t i = 0; i < spec.instruments; ++i)
    out.instruments.push_back("inst" + std::to_string(i + 1));
  out.closes.assign(spec.instruments, {});
  std::vector<double> walk(spec.instruments, 0.0); // log(price / start_price)

  const std::size_t total = spec.days * spec.minutes_per_day;
  for (std::size_t g = 0; g < total; ++g) {
    const std::size_t day = g / spec.minutes_per_day;
    const std::size_t minute = g % spec.minutes_per_day;
    out.timestamps.push_back(
        {spec.start.minutes + static_cast<std::int64_t>(day) * Timestamp::kMinutesPerDay +
         static_cast<std::int64_t>(minute)});

    if (g > 0) {
      const double f = normal.next();
      for (std::size_t i = 0; i < spec.instruments; ++i)
        walk[i] += spec.volatility * (common * f + own * normal.next());
    }

    double shock_log = 0.0;
    bool turbulent = false;
    if (spec.shock && spec.shock->duration_minutes > 0 && g > spec.shock->start_minute &&
        g < spec.shock->start_minute + spec.shock->duration_minutes) {
      const double half = 0.5 * static_cast<double>(spec.shock->duration_minutes);
      const double elapsed = static_cast<double>(g - spec.shock->start_minute);
      const double shape = elapsed <= half ? elapsed / half : (2.0 * half - elapsed) / half;
      shock_log = std::log1p(-spec.shock->depth_percent / 100.0) * shape;
      turbulent = true;
    }
    for (std::size_t i = 0; i < spec.instruments; ++i) {
      double log_price = walk[i] + shock_log;
      if (turbulent)
        log_price += spec.shock->turbulence * spec.volatility * normal.next();
      out.closes[i].push_back(spec.start_price * std::exp(log_price));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writers and readers

inline void write_bars_csv(std::ostream &out, const AlignedSeries &series,
                           TimeFormat time_format = TimeFormat::iso) {
  series.validate();
  out << "timestamp";
  for (std::size_t i = 0; i < series.width(); ++i)
    out << ','
        << (series.instruments.empty() ? "inst" + std::to_string(i + 1) : series.instruments[i]);
  out << '\n';
  for (std::size_t r = 0; r < series.rows(); ++r) {
    out << format_timestamp(series.timestamps[r], time_format);
    for (const auto &col : series.closes)
      out << ',' << format_number(col[r]);
    out << '\n';
  }
}

/// Columns dim,birth,death; essential classes have death "inf".
inline void write_diagram_csv(std::ostream &out, const PersistenceDiagram &diag) {
  out << "dim,birth,death\n";
  for (const auto &iv : diag.intervals)
    out << iv.dim << ',' << format_number(iv.birth) << ',' << format_number(iv.death) << '\n';
}

/// Columns level,x,y with levels numbered from 1.
inline void write_landscape_csv(std::ostream &out, const Landscape &land) {
  out << "level,x,y\n";
  for (std::size_t k = 0; k < land.levels.size(); ++k)
    for (const auto &p : land.levels[k].points())
      out << (k + 1) << ',' << format_number(p.x) << ',' << format_number(p.y) << '\n';
}

inline void write_anomaly_csv(std::ostream &out, const std::vector<AnomalyRecord> &records,
                              TimeFormat time_format = TimeFormat::iso) {
  out << "timestamp,y,ema,emvar,z\n";
  for (const auto &r : records) {
    out << format_timestamp(r.timestamp, time_format) << ',' << format_number(r.y) << ','
        << format_number(r.ema) << ',' << format_number(r.emvar) << ',';
    if (r.z)
      out << format_number(*r.z);
    out << '\n';
  }
}

inline std::vector<AnomalyRecord> read_anomaly_csv(std::istream &in,
                                                   const std::string &path = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || split_fields(line, ',') !=
                                     std::vector<std::string>{"timestamp", "y", "ema", "emvar", "z"})
    throw InputError(path + ": expected header timestamp,y,ema,emvar,z");
  ++line_no;
  std::vector<AnomalyRecord> out;
  BarFormat fmt;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line))
      continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto f = split_fields(line, ',');
    if (f.size() != 5)
      throw InputError(where + ": expected 5 fields");
    AnomalyRecord r;
    r.timestamp = detail::parse_time_field(f[0], fmt, where);
    const auto y = parse_number(f[1]), ema = parse_number(f[2]), emvar = parse_number(f[3]);
    if (!y || !ema || !emvar)
      throw InputError(where + ": unparseable number");
    r.y = *y;
    r.ema = *ema;
    r.emvar = *emvar;
    if (!f[4].empty()) {
      const auto z = parse_number(f[4]);
      if (!z)
        throw InputError(where + ": unparseable z");
      r.z = *z;
    }
    out.push_back(r);
  }
  return out;
}

/// Rows (timestamp, price, z) for overlay plots; price is the close of the
/// first instrument at each record's minute.
inline void write_plot_data(std::ostream &out, const std::vector<AnomalyRecord> &records,
                            const AlignedSeries &bars, TimeFormat time_format = TimeFormat::iso) {
  out << "timestamp,price,z\n";
  std::size_t row = 0;
  for (const auto &r : records) {
    while (row < bars.rows() && bars.timestamps[row] < r.timestamp)
      ++row;
    if (row == bars.rows() || bars.timestamps[row] != r.timestamp)
      throw StructuralError("record timestamp not found in bars");
    out << format_timestamp(r.timestamp, time_format) << ',' << format_number(bars.closes[0][row])
        << ',';
    if (r.z)
      out << format_number(*r.z);
    out << '\n';
  }
}

/// Point cloud CSV: one point per line, comma-separated coordinates. A
/// first line that does not parse as numbers is taken as a header.
inline PointCloud read_point_cloud(std::istream &in, const std::string &path = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> points;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line))
      continue;
    const auto fields = split_fields(line, ',');
    std::vector<double> p;
    bool numeric = true;
    for (const auto &f : fields) {
      const auto v = parse_number(f);
      if (!v || std::isinf(*v) || std::isnan(*v)) {
        numeric = false;
        break;
      }
      p.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError(path + ":" + std::to_string(line_no) + ": non-numeric coordinate");
    }
    first = false;
    if (!points.empty() && p.size() != points.front().size())
      throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(points.front().size()) + " coordinates");
    points.push_back(std::move(p));
  }
  if (points.empty())
    throw InputError(path + ": no points");
  return PointCloud(points);
}

inline PointCloud read_point_cloud(const std::string &path) {
  auto in = detail::open_input(path);
  return read_point_cloud(in, path);
}

} // namespace plscan

#endif // PLSCAN_IO_HPP
