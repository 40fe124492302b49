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

// plscan: persistence diagrams, landscapes and landscape-norm anomaly scans
// of minute bars from the command line.
//
// Exit codes: 0 success, 1 internal error, 2 bad flags or input.
// PLSCAN_LOG=error|warn|info|debug sets stderr verbosity (default warn).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plscan/anomaly.hpp"
#include "plscan/io.hpp"

namespace {

using namespace plscan;

enum class LogLevel { error, warn, info, debug };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char *env = std::getenv("PLSCAN_LOG");
    const std::string v = env ? env : "";
    if (v == "error")
      return LogLevel::error;
    if (v == "info")
      return LogLevel::info;
    if (v == "debug")
      return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log(LogLevel level, const std::string &msg) {
  static const char *names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level())
    std::cerr << "plscan: " << names[static_cast<int>(level)] << ": " << msg << '\n';
}

std::string one_line(std::string s) {
  for (char &c : s)
    if (c == '\n' || c == '\r')
      c = ' ';
  while (!s.empty() && s.back() == ' ')
    s.pop_back();
  return s;
}

// ---------------------------------------------------------------------------
// Flags

std::vector<int> default_dims() {
  const PipelineConfig cfg;
  return {cfg.dims.begin(), cfg.dims.end()};
}

struct SharedFlags {
  std::size_t window = PipelineConfig{}.window;
  double alpha = PipelineConfig{}.alpha;
  std::vector<int> dims = default_dims();
  double p = PipelineConfig{}.p;
  int max_dim = PipelineConfig{}.max_dim;
  std::optional<double> threshold;
  std::string format = "wide";
  std::string out = "-";
  std::uint64_t seed = 42;
};

struct BarFlags {
  std::string input;
  std::string delimiter = ",";
  std::string time_column = BarFormat{}.time_column;
  std::string close_column = BarFormat{}.close_column;
  std::string instrument_column = BarFormat{}.instrument_column;
  std::vector<std::string> columns;
  std::string time_format = "auto";
  bool fill = false;
  std::size_t max_gap = AlignPolicy{}.max_gap;
  std::string session;
};

struct ScanFlags {
  std::size_t warmup = PipelineConfig{}.warmup;
  double eps = PipelineConfig{}.variance_floor;
  bool bridge_days = false;
  unsigned threads = PipelineConfig{}.threads;
  std::optional<double> cap;
  std::string engine = "cohomology";
  std::string plot_data;
  std::string alphas = "0.05,0.1,0.2";
};

struct WindowFlags {
  std::string input_kind = "points";
  std::string at;
};

struct SynthFlags {
  SynthSpec spec;
  std::string start = to_iso(SynthSpec{}.start);
  std::optional<std::size_t> shock_start;
  ShockSpec shock;
};

void add_shared(CLI::App *cmd, SharedFlags &f) {
  cmd->add_option("--window", f.window, "Points per sliding window");
  cmd->add_option("--alpha", f.alpha, "EMA smoothing factor in (0,1)");
  cmd->add_option("--dims", f.dims, "Homology dimensions feeding the landscape")->delimiter(',');
  cmd->add_option("--p", f.p, "Landscape norm order (>= 1)");
  cmd->add_option("--max-dim", f.max_dim, "Top simplex dimension of the Rips complex");
  cmd->add_option("--threshold", f.threshold, "Rips scale cutoff (default: none)");
  cmd->add_option("--format", f.format, "Bar table layout")
      ->check(CLI::IsMember({"wide", "long"}));
  cmd->add_option("--out", f.out, "Output file, - for stdout");
  cmd->add_option("--seed", f.seed, "Random seed");
}

void add_bar_flags(CLI::App *cmd, BarFlags &f) {
  cmd->add_option("input", f.input, "Input CSV, - for stdin")->required();
  cmd->add_option("--delimiter", f.delimiter, "Field delimiter (one character)");
  cmd->add_option("--time-column", f.time_column, "Timestamp column name");
  cmd->add_option("--close-column", f.close_column, "Close column name (long layout)");
  cmd->add_option("--instrument-column", f.instrument_column,
                  "Instrument column name (long layout)");
  cmd->add_option("--columns", f.columns, "Wide layout price columns (default: all)")
      ->delimiter(',');
  cmd->add_option("--time-format", f.time_format, "Timestamp format")
      ->check(CLI::IsMember({"auto", "iso", "epoch"}));
  cmd->add_flag("--fill", f.fill, "Forward-fill short gaps instead of intersecting");
  cmd->add_option("--max-gap", f.max_gap, "Longest gap in minutes bridged by --fill");
  cmd->add_option("--session", f.session,
                  "Keep only bars in this UTC time-of-day range, HH:MM-HH:MM (default: all)");
}

void add_scan_flags(CLI::App *cmd, ScanFlags &f) {
  cmd->add_option("--warmup", f.warmup, "Leading records per segment without Z");
  cmd->add_option("--eps", f.eps, "Relative variance floor for Z");
  cmd->add_flag("--bridge-days", f.bridge_days, "Scan across day boundaries");
  cmd->add_option("--threads", f.threads, "Worker threads for window norms (0: all cores)");
  cmd->add_option("--cap", f.cap, "Cap essential classes at this death value");
  cmd->add_option("--engine", f.engine, "Persistence backend")
      ->check(CLI::IsMember({"cohomology", "boundary"}));
}

PipelineConfig pipeline_config(const SharedFlags &s, const ScanFlags &scan) {
  PipelineConfig cfg;
  cfg.window = s.window;
  cfg.alpha = s.alpha;
  cfg.dims = {s.dims.begin(), s.dims.end()};
  cfg.p = s.p;
  cfg.max_dim = s.max_dim;
  cfg.threshold = s.threshold;
  cfg.essential_cap = scan.cap;
  cfg.variance_floor = scan.eps;
  cfg.warmup = scan.warmup;
  cfg.bridge_days = scan.bridge_days;
  cfg.threads = scan.threads;
  cfg.engine = scan.engine == "boundary" ? PersistenceEngine::boundary : PersistenceEngine::cohomology;
  cfg.validate();
  return cfg;
}

BarFormat bar_format(const SharedFlags &s, const BarFlags &b) {
  if (b.delimiter.size() != 1)
    throw InputError("--delimiter must be a single character");
  BarFormat fmt;
  fmt.layout = s.format == "long" ? TableLayout::long_ : TableLayout::wide;
  fmt.delimiter = b.delimiter.front();
  fmt.time_column = b.time_column;
  fmt.close_column = b.close_column;
  fmt.instrument_column = b.instrument_column;
  fmt.columns = b.columns;
  if (b.time_format == "iso")
    fmt.time_format = TimeFormat::iso;
  else if (b.time_format == "epoch")
    fmt.time_format = TimeFormat::epoch;
  return fmt;
}

TimeFormat output_time_format(const BarFlags &b) {
  return b.time_format == "epoch" ? TimeFormat::epoch : TimeFormat::iso;
}

// ---------------------------------------------------------------------------
// I/O

std::unique_ptr<std::istream> open_in(const std::string &path) {
  if (path == "-") {
    auto buffer = std::make_unique<std::stringstream>();
    *buffer << std::cin.rdbuf();
    return buffer;
  }
  auto in = std::make_unique<std::ifstream>(path);
  if (!*in)
    throw InputError("cannot open " + path);
  return in;
}

class Output {
public:
  explicit Output(const std::string &path) : path_(path) {
    if (path != "-") {
      file_.open(path);
      if (!file_)
        throw InputError("cannot write " + path);
    }
  }
  std::ostream &stream() { return path_ == "-" ? std::cout : file_; }
  void close() {
    stream().flush();
    if (!stream())
      throw InputError("write failed: " + path_);
  }

private:
  std::string path_;
  std::ofstream file_;
};

AlignedSeries load_bars(const SharedFlags &s, const BarFlags &b) {
  const BarFormat fmt = bar_format(s, b);
  std::optional<SessionFilter> session;
  if (!b.session.empty())
    session = SessionFilter::parse(b.session);
  auto in = open_in(b.input);
  const auto table = read_bar_table(*in, fmt, b.input);
  AlignPolicy policy;
  policy.mode = b.fill ? AlignMode::forward_fill : AlignMode::intersection;
  policy.max_gap = b.max_gap;
  AlignedSeries bars = align(table, policy);
  if (session)
    bars = filter_session(bars, *session);
  log(LogLevel::info, "loaded " + std::to_string(bars.width()) + " instruments x " +
                          std::to_string(bars.rows()) + " minutes from " + b.input);
  return bars;
}

/// The window of cfg.window returns ending at `at`, within its scan segment.
PointCloud window_at(const AlignedSeries &bars, const std::string &at_text,
                     const PipelineConfig &cfg, const BarFlags &b) {
  const auto at = parse_timestamp(at_text, b.time_format == "epoch" ? TimeFormat::epoch
                                                                    : TimeFormat::iso);
  if (!at)
    throw InputError("--at: unparseable timestamp " + at_text);
  for (auto [begin, end] : scan_segments(bars, cfg.bridge_days)) {
    if (*at < bars.timestamps[begin] || bars.timestamps[end - 1] < *at)
      continue;
    const auto returns = log_returns(bars.slice(begin, end));
    for (std::size_t j = 0; j < returns.size(); ++j) {
      if (returns[j].timestamp != *at)
        continue;
      if (j + 1 < cfg.window)
        break;
      const auto windows =
          sliding_windows(std::span(returns).subspan(j + 1 - cfg.window, cfg.window), cfg.window);
      return windows.front().cloud;
    }
    break;
  }
  throw InputError("no full window of " + std::to_string(cfg.window) + " returns ends at " +
                   at_text);
}

PointCloud load_cloud(const SharedFlags &s, const BarFlags &b, const WindowFlags &w,
                      const PipelineConfig &cfg) {
  if (w.input_kind == "points") {
    auto in = open_in(b.input);
    return read_point_cloud(*in, b.input);
  }
  if (w.at.empty())
    throw InputError("--at is required with --input-kind bars");
  return window_at(load_bars(s, b), w.at, cfg, b);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_persistence(const SharedFlags &s, const BarFlags &b, const WindowFlags &w,
                    const ScanFlags &scan) {
  const PipelineConfig cfg = pipeline_config(s, scan);
  Output out(s.out);
  const PointCloud cloud = load_cloud(s, b, w, cfg);
  const auto diag =
      rips_diagram(cloud, cfg.max_dim, cfg.threshold, cfg.engine);
  write_diagram_csv(out.stream(), diag);
  out.close();
  return 0;
}

int cmd_landscape(const SharedFlags &s, const BarFlags &b, const WindowFlags &w,
                  const ScanFlags &scan, bool norm_only) {
  const PipelineConfig cfg = pipeline_config(s, scan);
  Output out(s.out);
  const PointCloud cloud = load_cloud(s, b, w, cfg);
  const auto diag =
      rips_diagram(cloud, cfg.max_dim, cfg.threshold, cfg.engine);
  const Landscape land = build_landscape(diag, cfg.dims, {.essential_cap = cfg.essential_cap});
  if (norm_only)
    out.stream() << format_number(landscape_norm(land, cfg.p)) << '\n';
  else
    write_landscape_csv(out.stream(), land);
  out.close();
  return 0;
}

int cmd_scan(const SharedFlags &s, const BarFlags &b, const ScanFlags &scan) {
  const PipelineConfig cfg = pipeline_config(s, scan);
  Output out(s.out);
  std::optional<Output> plot;
  if (!scan.plot_data.empty())
    plot.emplace(scan.plot_data);
  const AlignedSeries bars = load_bars(s, b);

  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_pipeline(bars, cfg);
  log(LogLevel::info, "scanned " + std::to_string(records.size()) + " windows in " +
                          format_number(seconds_since(t0)) + " s");
  write_anomaly_csv(out.stream(), records, output_time_format(b));
  out.close();
  if (plot) {
    write_plot_data(plot->stream(), records, bars, output_time_format(b));
    plot->close();
  }
  return 0;
}

std::vector<double> parse_alpha_grid(const std::string &text) {
  std::vector<double> grid;
  for (const auto &field : split_fields(text, ',')) {
    if (field.empty())
      continue;
    const auto v = parse_number(field);
    if (!v || !(*v > 0.0 && *v < 1.0))
      throw InputError("--alphas: " + field + " is not in (0,1)");
    grid.push_back(*v);
  }
  if (grid.empty())
    throw InputError("--alphas: empty grid");
  return grid;
}

int cmd_sweep(const SharedFlags &s, const BarFlags &b, const ScanFlags &scan) {
  PipelineConfig cfg = pipeline_config(s, scan);
  const auto grid = parse_alpha_grid(scan.alphas);
  Output out(s.out);
  const AlignedSeries bars = load_bars(s, b);

  // The norms do not depend on alpha; only the recursion is rerun.
  const auto t0 = std::chrono::steady_clock::now();
  const auto norms = segment_norms(bars, cfg);
  log(LogLevel::info, "norms computed in " + format_number(seconds_since(t0)) + " s");

  out.stream() << "alpha,max_abs_z,argmax_timestamp\n";
  for (double alpha : grid) {
    cfg.alpha = alpha;
    std::optional<AnomalyRecord> best;
    for (const auto &r : score_segments(norms, cfg))
      if (r.z && (!best || std::abs(*r.z) > std::abs(*best->z)))
        best = r;
    out.stream() << format_number(alpha) << ',';
    if (best)
      out.stream() << format_number(std::abs(*best->z)) << ','
                   << format_timestamp(best->timestamp, output_time_format(b));
    else
      out.stream() << ',';
    out.stream() << '\n';
  }
  out.close();
  return 0;
}

int cmd_synth(const SharedFlags &s, SynthFlags f) {
  const auto start = parse_iso_timestamp(f.start);
  if (!start)
    throw InputError("--start: unparseable timestamp " + f.start);
  f.spec.start = *start;
  if (f.shock_start) {
    f.shock.start_minute = *f.shock_start;
    f.spec.shock = f.shock;
  }
  if (!(f.spec.correlation >= 0.0 && f.spec.correlation <= 1.0))
    throw InputError("--correlation must lie in [0,1]");
  if (!(f.spec.volatility >= 0.0) || !(f.spec.start_price > 0.0))
    throw InputError("--volatility must be >= 0 and --start-price > 0");
  if (f.spec.shock && !(f.shock.depth_percent >= 0.0 && f.shock.depth_percent < 100.0))
    throw InputError("--shock-depth must lie in [0,100)");
  Output out(s.out);
  const AlignedSeries bars = synth_generate(s.seed, f.spec);
  if (s.format == "long") {
    out.stream() << "timestamp,instrument,close\n";
    for (std::size_t i = 0; i < bars.width(); ++i)
      for (std::size_t r = 0; r < bars.rows(); ++r)
        out.stream() << to_iso(bars.timestamps[r]) << ',' << bars.instruments[i] << ','
                     << format_number(bars.closes[i][r]) << '\n';
  } else {
    write_bars_csv(out.stream(), bars);
  }
  out.close();
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Persistence landscapes and landscape-norm anomaly scans of minute bars", "plscan"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SharedFlags shared;
  BarFlags bar_flags;
  ScanFlags scan_flags;
  WindowFlags window_flags;
  SynthFlags synth_flags;
  bool norm_only = false;

  auto *persistence = app.add_subcommand("persistence", "Persistence diagram of one point cloud");
  auto *landscape = app.add_subcommand("landscape", "Persistence landscape of one point cloud");
  for (auto *cmd : {persistence, landscape}) {
    add_shared(cmd, shared);
    add_bar_flags(cmd, bar_flags);
    add_scan_flags(cmd, scan_flags);
    cmd->add_option("--input-kind", window_flags.input_kind, "Input is a point cloud or bars")
        ->check(CLI::IsMember({"points", "bars"}));
    cmd->add_option("--at", window_flags.at, "Bars input: timestamp the window ends at");
  }
  landscape->add_flag("--norm", norm_only, "Print only the landscape norm");

  auto *scan = app.add_subcommand("scan", "Anomaly score of every sliding window");
  auto *sweep = app.add_subcommand("sweep", "Largest |Z| and its time for each alpha");
  for (auto *cmd : {scan, sweep}) {
    add_shared(cmd, shared);
    add_bar_flags(cmd, bar_flags);
    add_scan_flags(cmd, scan_flags);
  }
  scan->add_option("--plot-data", scan_flags.plot_data, "Also write timestamp,price,z rows here");
  sweep->add_option("--alphas", scan_flags.alphas, "Comma-separated alpha grid");

  auto *synth = app.add_subcommand("synth", "Seeded synthetic minute bars");
  add_shared(synth, shared);
  synth->add_option("--days", synth_flags.spec.days, "Trading days");
  synth->add_option("--minutes-per-day", synth_flags.spec.minutes_per_day, "Minutes per day");
  synth->add_option("--instruments", synth_flags.spec.instruments, "Instrument count");
  synth->add_option("--volatility", synth_flags.spec.volatility, "Per-minute log-return sd");
  synth->add_option("--correlation", synth_flags.spec.correlation, "Pairwise return correlation");
  synth->add_option("--start-price", synth_flags.spec.start_price, "Opening price");
  synth->add_option("--start", synth_flags.start, "First timestamp (YYYY-MM-DDTHH:MM)");
  synth->add_option("--shock-start", synth_flags.shock_start,
                    "Minute index of the shock onset (default: no shock)");
  synth->add_option("--shock-depth", synth_flags.shock.depth_percent, "Shock depth in percent");
  synth->add_option("--shock-duration", synth_flags.shock.duration_minutes,
                    "Shock length in minutes");
  synth->add_option("--turbulence", synth_flags.shock.turbulence,
                    "Extra noise during the shock, in units of --volatility");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "plscan: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (*persistence)
      return cmd_persistence(shared, bar_flags, window_flags, scan_flags);
    if (*landscape)
      return cmd_landscape(shared, bar_flags, window_flags, scan_flags, norm_only);
    if (*scan)
      return cmd_scan(shared, bar_flags, scan_flags);
    if (*sweep)
      return cmd_sweep(shared, bar_flags, scan_flags);
    if (*synth)
      return cmd_synth(shared, synth_flags);
  } catch (const InputError &e) {
    std::cerr << "plscan: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const DomainError &e) {
    std::cerr << "plscan: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "plscan: internal error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 1;
}
