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

#ifndef PLSCAN_ANOMALY_HPP
#define PLSCAN_ANOMALY_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "plscan/cohomology.hpp"
#include "plscan/error.hpp"
#include "plscan/geometry.hpp"
#include "plscan/homology.hpp"
#include "plscan/landscape.hpp"
#include "plscan/rips.hpp"
#include "plscan/series.hpp"
#include "plscan/timestamp.hpp"

namespace plscan {

/// Log-returns of every instrument over one minute.
struct ReturnVector {
  Timestamp timestamp;
  std::vector<double> components;
};

struct PipelineConfig {
  std::size_t window = 50;
  double alpha = 0.1;
  std::set<int> dims{1};
  double p = 1.0;
  int max_dim = 2;
  std::optional<double> threshold;
  std::optional<double> essential_cap;
  /// Z is withheld while the previous EMVar is at or below
  /// variance_floor * EMA^2 (see z_score).
  double variance_floor = 1e-12;
  /// Leading records of each segment whose Z is withheld. The first record
  /// never has a previous EMVar, so values below 1 behave like 1.
  std::size_t warmup = 1;
  /// Treat the whole input as one segment instead of resetting per day.
  bool bridge_days = false;
  /// Worker threads for the per-window norms; 0 picks the hardware count.
  unsigned threads = 1;
  /// Persistence backend. Both give the same diagram; cohomology skips
  /// building the filtration and is much faster on Rips windows.
  PersistenceEngine engine = PersistenceEngine::cohomology;

  void validate() const {
    if (window < 2)
      throw DomainError("window must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw DomainError("alpha must lie strictly between 0 and 1");
    if (!(p >= 1.0) || std::isinf(p))
      throw DomainError("norm order p must be a finite value >= 1");
    if (dims.empty())
      throw DomainError("at least one homology dimension is required");
    for (int d : dims)
      if (d < 0)
        throw DomainError("homology dimensions must be non-negative");
    if (max_dim < 0)
      throw DomainError("max_dim must be non-negative");
    if (threshold && !(*threshold >= 0.0))
      throw DomainError("threshold must be non-negative");
    if (!(variance_floor >= 0.0))
      throw DomainError("variance floor must be non-negative");
  }
};

struct AnomalyRecord {
  Timestamp timestamp;
  double y = 0.0;
  double ema = 0.0;
  double emvar = 0.0;
  std::optional<double> z; // empty while undefined

  friend bool operator==(const AnomalyRecord &, const AnomalyRecord &) = default;
};

/// ln(P_j) - ln(P_{j-1}) per instrument; one vector per row after the first,
/// stamped with the later row's time.
inline std::vector<ReturnVector> log_returns(const AlignedSeries &series) {
  series.validate();
  std::vector<ReturnVector> out;
  if (series.rows() < 2)
    return out;
  for (std::size_t i = 0; i < series.width(); ++i)
    for (std::size_t j = 0; j < series.rows(); ++j)
      if (!(series.closes[i][j] > 0.0) || std::isinf(series.closes[i][j])) {
        const std::string name =
            series.instruments.empty() ? "#" + std::to_string(i) : series.instruments[i];
        throw InputError("rejected price " + std::to_string(series.closes[i][j]) +
                         " for instrument " + name + " at " + to_iso(series.timestamps[j]) +
                         ": prices must be positive");
      }

  out.reserve(series.rows() - 1);
  for (std::size_t j = 1; j < series.rows(); ++j) {
    ReturnVector r{series.timestamps[j], std::vector<double>(series.width())};
    for (std::size_t i = 0; i < series.width(); ++i)
      r.components[i] = std::log(series.closes[i][j]) - std::log(series.closes[i][j - 1]);
    out.push_back(std::move(r));
  }
  return out;
}

/// The point cloud of the w most recent return vectors ending at `timestamp`.
struct Window {
  Timestamp timestamp;
  PointCloud cloud;
};

/// Every run of w consecutive returns; empty when fewer than w exist.
inline std::vector<Window> sliding_windows(std::span<const ReturnVector> returns, std::size_t w) {
  if (w == 0)
    throw DomainError("window must be positive");
  std::vector<Window> out;
  if (returns.size() < w)
    return out;
  const std::size_t dim = returns.front().components.size();
  for (const auto &r : returns)
    if (r.components.size() != dim)
      throw StructuralError("return vectors have differing instrument counts");

  out.reserve(returns.size() - w + 1);
  for (std::size_t end = w; end <= returns.size(); ++end) {
    std::vector<double> coords;
    coords.reserve(w * dim);
    for (std::size_t j = end - w; j < end; ++j)
      coords.insert(coords.end(), returns[j].components.begin(), returns[j].components.end());
    out.push_back({returns[end - 1].timestamp, PointCloud(std::move(coords), dim)});
  }
  return out;
}

/// Landscape norm of one window: distances, Rips filtration, persistence,
/// landscape over cfg.dims, then the order-p norm.
inline double window_norm(const PointCloud &cloud, const PipelineConfig &cfg) {
  const PersistenceDiagram diag = rips_diagram(cloud, cfg.max_dim, cfg.threshold, cfg.engine);
  const Landscape land = build_landscape(diag, cfg.dims, {.essential_cap = cfg.essential_cap});
  return landscape_norm(land, cfg.p);
}

struct NormSample {
  Timestamp timestamp;
  double y = 0.0;
};

/// Per-window norms in window order. Windows are independent, so they are
/// spread over cfg.threads workers; the result does not depend on the
/// schedule.
inline std::vector<NormSample> norm_series(std::span<const Window> windows,
                                           const PipelineConfig &cfg) {
  cfg.validate();
  std::vector<NormSample> out(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    out[i].timestamp = windows[i].timestamp;

  unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, windows.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < windows.size(); ++i)
      out[i].y = window_norm(windows[i].cloud, cfg);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < windows.size(); i = next++) {
      try {
        out[i].y = window_norm(windows[i].cloud, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = windows.size();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back(work);
  pool.clear();
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

struct EmaStep {
  double ema = 0.0;
  double emvar = 0.0;
  double delta = 0.0;
};

/// One step of the exponential moving average / variance recursion.
inline EmaStep ema_emvar_step(double prev_ema, double prev_emvar, double y, double alpha) noexcept {
  EmaStep s;
  s.delta = y - prev_ema;
  s.ema = prev_ema + alpha * s.delta;
  s.emvar = (1.0 - alpha) * (prev_emvar + alpha * s.delta * s.delta);
  return s;
}

/// Deviation of y from the previous EMA in units of the previous
/// exponential standard deviation. Empty when the previous variance is at
/// or below the floor eps * prev_ema^2 (always when it is zero). The floor
/// is relative so that rescaling the norms never changes which scores are
/// defined; norms of minute log-returns are around 1e-9.
inline std::optional<double> z_score(double y, double prev_ema, double prev_emvar,
                                     double eps) noexcept {
  if (!(prev_emvar > 0.0) || !(prev_emvar > eps * prev_ema * prev_ema))
    return std::nullopt;
  return (y - prev_ema) / std::sqrt(prev_emvar);
}

/// EMA/EMVar recursion and Z over one contiguous segment of norms. The
/// recursion starts at EMA = Y_1, EMVar = 0.
inline std::vector<AnomalyRecord> score_series(std::span<const NormSample> ys,
                                               const PipelineConfig &cfg) {
  cfg.validate();
  std::vector<AnomalyRecord> out;
  out.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    AnomalyRecord rec{ys[i].timestamp, ys[i].y, ys[i].y, 0.0, std::nullopt};
    if (i > 0) {
      const AnomalyRecord &prev = out.back();
      const EmaStep step = ema_emvar_step(prev.ema, prev.emvar, rec.y, cfg.alpha);
      rec.ema = step.ema;
      rec.emvar = step.emvar;
      if (i >= cfg.warmup)
        rec.z = z_score(rec.y, prev.ema, prev.emvar, cfg.variance_floor);
    }
    out.push_back(rec);
  }
  return out;
}

/// Row ranges [begin, end) that are scanned independently: one per
/// calendar day, or the whole series when days are bridged.
inline std::vector<std::pair<std::size_t, std::size_t>> scan_segments(const AlignedSeries &bars,
                                                                      bool bridge_days) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (bars.rows() == 0)
    return out;
  if (bridge_days) {
    out.emplace_back(0, bars.rows());
    return out;
  }
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= bars.rows(); ++i)
    if (i == bars.rows() || bars.timestamps[i].day() != bars.timestamps[begin].day()) {
      out.emplace_back(begin, i);
      begin = i;
    }
  return out;
}

/// Landscape norms of every window of every segment, in time order.
inline std::vector<std::vector<NormSample>> segment_norms(const AlignedSeries &bars,
                                                          const PipelineConfig &cfg) {
  cfg.validate();
  bars.validate();
  std::vector<std::vector<NormSample>> out;
  for (auto [begin, end] : scan_segments(bars, cfg.bridge_days)) {
    const auto returns = log_returns(bars.slice(begin, end));
    const auto windows = sliding_windows(returns, cfg.window);
    out.push_back(norm_series(windows, cfg));
  }
  return out;
}

inline std::vector<AnomalyRecord> score_segments(const std::vector<std::vector<NormSample>> &norms,
                                                 const PipelineConfig &cfg) {
  std::vector<AnomalyRecord> out;
  for (const auto &segment : norms) {
    auto records = score_series(segment, cfg);
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

/// Full scan: per segment, log-returns, sliding windows, landscape norms
/// and the EMA/EMVar-normalized deviation. Each segment with P prices
/// yields max(0, P - window) records.
inline std::vector<AnomalyRecord> run_pipeline(const AlignedSeries &bars,
                                               const PipelineConfig &cfg) {
  return score_segments(segment_norms(bars, cfg), cfg);
}

} // namespace plscan

#endif // PLSCAN_ANOMALY_HPP
