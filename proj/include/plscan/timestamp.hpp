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

#ifndef PLSCAN_TIMESTAMP_HPP
#define PLSCAN_TIMESTAMP_HPP

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace plscan {

/// Minute-resolution UTC time, counted in minutes since 1970-01-01T00:00.
struct Timestamp {
  std::int64_t minutes = 0;

  static constexpr std::int64_t kMinutesPerDay = 1440;

  /// Calendar day number (days since epoch), floor division.
  std::int64_t day() const noexcept {
    return minutes >= 0 ? minutes / kMinutesPerDay
                        : -((-minutes + kMinutesPerDay - 1) / kMinutesPerDay);
  }

  friend auto operator<=>(const Timestamp &, const Timestamp &) = default;
};

enum class TimeFormat { iso, epoch };

namespace detail {

inline std::optional<int> parse_fixed(std::string_view s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size())
    return std::nullopt;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9')
      return std::nullopt;
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

} // namespace detail

/// Accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DDTHH:MM", either optionally
/// followed by ":SS" (seconds must be 00) and a trailing "Z".
inline std::optional<Timestamp> parse_iso_timestamp(std::string_view s) {
  if (!s.empty() && s.back() == 'Z')
    s.remove_suffix(1);
  if (s.size() != 16 && s.size() != 19)
    return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
    return std::nullopt;
  auto y = detail::parse_fixed(s, 0, 4), mo = detail::parse_fixed(s, 5, 2),
       d = detail::parse_fixed(s, 8, 2), h = detail::parse_fixed(s, 11, 2),
       mi = detail::parse_fixed(s, 14, 2);
  if (!y || !mo || !d || !h || !mi || *h > 23 || *mi > 59)
    return std::nullopt;
  if (s.size() == 19) {
    auto sec = detail::parse_fixed(s, 17, 2);
    if (s[16] != ':' || !sec || *sec != 0)
      return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok())
    return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return Timestamp{days * Timestamp::kMinutesPerDay + *h * 60 + *mi};
}

inline std::optional<Timestamp> parse_epoch_minutes(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    return std::nullopt;
  return Timestamp{v};
}

inline std::optional<Timestamp> parse_timestamp(std::string_view s, TimeFormat format) {
  return format == TimeFormat::iso ? parse_iso_timestamp(s) : parse_epoch_minutes(s);
}

/// "YYYY-MM-DDTHH:MM"
inline std::string to_iso(Timestamp t) {
  using namespace std::chrono;
  const std::int64_t day_number = t.day();
  const std::int64_t minute_of_day = t.minutes - day_number * Timestamp::kMinutesPerDay;
  const year_month_day ymd{sys_days{days{day_number}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(minute_of_day / 60), static_cast<int>(minute_of_day % 60));
  return buf;
}

inline std::string format_timestamp(Timestamp t, TimeFormat format) {
  return format == TimeFormat::iso ? to_iso(t) : std::to_string(t.minutes);
}

} // namespace plscan

#endif // PLSCAN_TIMESTAMP_HPP
