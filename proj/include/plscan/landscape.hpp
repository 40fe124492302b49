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

#ifndef PLSCAN_LANDSCAPE_HPP
#define PLSCAN_LANDSCAPE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "plscan/error.hpp"
#include "plscan/homology.hpp"

namespace plscan {

/// Triangular bump of height (death - birth) / 2 over [birth, death].
struct Tent {
  double birth = 0.0;
  double death = 0.0;

  double midpoint() const noexcept { return 0.5 * (birth + death); }
  double height() const noexcept { return 0.5 * (death - birth); }

  friend bool operator==(const Tent &, const Tent &) = default;
};

inline double tent_eval(const Tent &t, double x) noexcept {
  if (x <= t.birth || x >= t.death)
    return 0.0;
  return std::min(x - t.birth, t.death - x);
}

struct Breakpoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Breakpoint &, const Breakpoint &) = default;
};

/// Line carried by one segment of a level: a tent leg, or zero. Keeping the
/// generating leg makes evaluation reproduce tent_eval bit for bit.
struct SegmentLine {
  enum class Kind { zero, rise, fall, interpolate };
  Kind kind = Kind::interpolate;
  double anchor = 0.0; // birth for rise (x - anchor), death for fall (anchor - x)

  friend bool operator==(const SegmentLine &, const SegmentLine &) = default;
};

/// One landscape level: a piecewise-linear function given by breakpoints
/// sorted by x, zero outside [front().x, back().x].
class LandscapeLevel {
public:
  LandscapeLevel() = default;

  /// Breakpoints only; segments are evaluated by linear interpolation.
  explicit LandscapeLevel(std::vector<Breakpoint> points)
      : points_(std::move(points)),
        lines_(points_.empty() ? 0 : points_.size() - 1, SegmentLine{}) {}

  LandscapeLevel(std::vector<Breakpoint> points, std::vector<SegmentLine> lines)
      : points_(std::move(points)), lines_(std::move(lines)) {
    if (lines_.size() + 1 != points_.size() && !(points_.empty() && lines_.empty()))
      throw StructuralError("landscape level needs one line per segment");
  }

  const std::vector<Breakpoint> &points() const noexcept { return points_; }
  const std::vector<SegmentLine> &lines() const noexcept { return lines_; }

  double operator()(double x) const noexcept {
    if (points_.size() < 2 || x <= points_.front().x || x >= points_.back().x)
      return 0.0;
    auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const Breakpoint &p) { return v < p.x; });
    auto lo = hi - 1;
    const SegmentLine &line = lines_[static_cast<std::size_t>(lo - points_.begin())];
    switch (line.kind) {
    case SegmentLine::Kind::zero: return 0.0;
    case SegmentLine::Kind::rise: return x - line.anchor;
    case SegmentLine::Kind::fall: return line.anchor - x;
    case SegmentLine::Kind::interpolate: break;
    }
    if (hi->x == lo->x)
      return std::max(lo->y, hi->y);
    const double t = (x - lo->x) / (hi->x - lo->x);
    return lo->y + t * (hi->y - lo->y);
  }

private:
  std::vector<Breakpoint> points_;
  std::vector<SegmentLine> lines_;
};

/// Sequence of levels; level k (0-based) is the (k+1)-th largest envelope.
struct Landscape {
  std::vector<LandscapeLevel> levels;

  double operator()(std::size_t k, double x) const noexcept {
    return k < levels.size() ? levels[k](x) : 0.0;
  }
};

struct LandscapeOptions {
  /// Essential intervals are excluded unless a cap is given, in which case
  /// (birth, inf) is truncated to (birth, cap). Births at or above the cap
  /// are dropped.
  std::optional<double> essential_cap;
};

/// Tents of the finite intervals whose dimension is in `dims`.
inline std::vector<Tent> landscape_tents(const PersistenceDiagram &diag, const std::set<int> &dims,
                                         const LandscapeOptions &options = {}) {
  std::vector<Tent> tents;
  for (const auto &iv : diag.intervals) {
    if (!dims.contains(iv.dim))
      continue;
    double death = iv.death;
    if (iv.essential()) {
      if (!options.essential_cap)
        continue;
      death = *options.essential_cap;
    }
    if (iv.birth < death)
      tents.push_back({iv.birth, death});
  }
  return tents;
}

/// Exact k-max envelopes of a multiset of tents.
///
/// Levels are peeled one at a time. Tents are kept sorted by birth
/// ascending, death descending; the top envelope is traced by walking this
/// list and jumping to the next tent that outlives the current one. Where
/// two tents cross, the part below the crossing is itself a tent (birth of
/// the later one, death of the earlier one) and is handed to the next level
/// together with every tent the walk passed over. Each level therefore
/// sees exactly the remaining mass, with multiplicity.
inline Landscape landscape_from_tents(std::vector<Tent> tents) {
  auto order = [](const Tent &a, const Tent &b) {
    return a.birth != b.birth ? a.birth < b.birth : a.death > b.death;
  };
  std::sort(tents.begin(), tents.end(), order);

  using Kind = SegmentLine::Kind;
  Landscape land;
  std::vector<Tent> next;
  while (!tents.empty()) {
    std::vector<Breakpoint> pts;
    std::vector<SegmentLine> lines;
    // Appends a breakpoint reached along `line`; coincident points collapse.
    auto extend = [&](Breakpoint p, SegmentLine line) {
      if (pts.back() == p)
        return;
      pts.push_back(p);
      lines.push_back(line);
    };

    next.clear();
    Tent current = tents.front();
    pts.push_back({current.birth, 0.0});
    extend({current.midpoint(), current.height()}, {Kind::rise, current.birth});
    for (std::size_t i = 1; i < tents.size(); ++i) {
      const Tent &t = tents[i];
      if (t.death <= current.death) {
        // Nested in the current tent: lies entirely below the envelope.
        next.push_back(t);
        continue;
      }
      if (t.birth < current.death) {
        const double x = 0.5 * (t.birth + current.death);
        extend({x, 0.5 * (current.death - t.birth)}, {Kind::fall, current.death});
        next.push_back({t.birth, current.death});
      } else {
        extend({current.death, 0.0}, {Kind::fall, current.death});
        extend({t.birth, 0.0}, {Kind::zero, 0.0});
      }
      extend({t.midpoint(), t.height()}, {Kind::rise, t.birth});
      current = t;
    }
    extend({current.death, 0.0}, {Kind::fall, current.death});
    land.levels.emplace_back(std::move(pts), std::move(lines));
    std::sort(next.begin(), next.end(), order);
    tents.swap(next);
  }
  return land;
}

inline Landscape build_landscape(const PersistenceDiagram &diag, const std::set<int> &dims,
                                 const LandscapeOptions &options = {}) {
  return landscape_from_tents(landscape_tents(diag, dims, options));
}

namespace detail {

// Integral of y(t)^p over a segment where y goes linearly from a to b >= 0.
inline double segment_power_integral(double width, double a, double b, double p) {
  if (width <= 0.0)
    return 0.0;
  if (p == 1.0)
    return 0.5 * width * (a + b);
  const double diff = b - a;
  const double hi = std::max(a, b);
  if (std::abs(diff) <= 1e-6 * hi) {
    // Closed form cancels catastrophically here; expand around the mean:
    // mean^p * (1 + p(p-1)/24 * (diff/mean)^2 + O(diff^4)).
    const double mean = 0.5 * (a + b);
    if (mean == 0.0)
      return 0.0;
    const double r = diff / mean;
    return width * std::pow(mean, p) * (1.0 + p * (p - 1.0) / 24.0 * r * r);
  }
  return width * (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / ((p + 1.0) * diff);
}

} // namespace detail

/// Integral of |level|^p.
inline double level_power_integral(const LandscapeLevel &level, double p) {
  const auto &pts = level.points();
  double sum = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    sum += detail::segment_power_integral(pts[i].x - pts[i - 1].x, pts[i - 1].y, pts[i].y, p);
  return sum;
}

/// Sum over levels of (integral of |level|^p)^(1/p). For p = 1 this is the
/// total area under all levels.
inline double landscape_norm(const Landscape &land, double p = 1.0) {
  if (!(p >= 1.0) || std::isinf(p))
    throw DomainError("landscape norm order must be a finite p >= 1");
  double norm = 0.0;
  for (const auto &level : land.levels) {
    const double integral = level_power_integral(level, p);
    norm += p == 1.0 ? integral : std::pow(integral, 1.0 / p);
  }
  return norm;
}

} // namespace plscan

#endif // PLSCAN_LANDSCAPE_HPP
