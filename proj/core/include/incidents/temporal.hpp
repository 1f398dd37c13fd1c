// Copyright 2026 The Incidents Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incidents/civil_time.hpp"
#include "incidents/geo.hpp"

namespace incidents {

inline constexpr std::size_t kDefaultRtiWindow = 7;
inline constexpr std::size_t kDefaultSmoothWindow = 7;

/// Per-day counts over consecutive days starting at `start`.
struct DailySeries {
  Date start;
  std::vector<std::uint64_t> counts;
  std::string category;

  std::size_t size() const { return counts.size(); }
  bool empty() const { return counts.empty(); }
  // Last covered day; requires a non-empty series.
  Date last() const { return start + static_cast<std::int64_t>(counts.size()) - 1; }
  bool covers(Date day) const { return !empty() && day >= start && day <= last(); }
  std::uint64_t at(Date day) const;  // 0 outside the covered range

  friend bool operator==(const DailySeries&, const DailySeries&) = default;
};

/// CSV `date,count` with strictly increasing dates; missing days are
/// zero-filled.
DailySeries read_series_csv(std::istream& in, const std::string& source = "<stream>");
DailySeries load_series_csv(const std::filesystem::path& path);
void write_series_csv(const DailySeries& series, std::ostream& out);

/// Daily counts of dated `category` detections, zero-filled between the
/// first and last day. Throws DataError if there is none.
DailySeries daily_counts(std::span<const Detection> detections, std::string_view category);

/// sum_{d=e}^{e+w} N_d / sum_{d=e-w}^{e} N_d. Day e appears in both sums.
/// Returns nullopt when the denominator is zero; throws DataError when the
/// series does not cover [e-w, e+w].
std::optional<double> rti(const DailySeries& series, Date event_day,
                          std::size_t w = kDefaultRtiWindow);

struct EventRti {
  std::string name;
  Date day;
  std::optional<double> rti;
  std::string reason;  // set when rti is undefined
};

struct MrtiReport {
  double mrti = 0.0;
  std::size_t defined = 0;
  std::vector<EventRti> events;
  std::vector<std::string> undefined;  // names of events without a defined RTI
};

/// Mean RTI over events whose RTI is defined. Events outside coverage or
/// with a zero denominator are listed as undefined. Throws DataError when no
/// event has a defined RTI.
MrtiReport mrti(const DailySeries& series, std::span<const GeoEvent> events,
                std::size_t w = kDefaultRtiWindow);

/// Centered moving average of odd width; at the edges only the available
/// neighbours are averaged.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

/// Both series are zero-filled to the union of their ranges, normalized to
/// sum 1, smoothed, renormalized, and compared as sum(min) / sum(max).
/// Throws DataError if both are all zero.
double histogram_iou(const DailySeries& a, const DailySeries& b,
                     std::size_t smooth_window = kDefaultSmoothWindow);

/// Days d with full [d-w, d+w] coverage and rti(d) >= threshold whose
/// day-over-day increase N_d - N_{d-1} is positive and the largest within
/// [d-w, d+w], the earliest winning ties.
std::vector<Date> flag_peaks(const DailySeries& series, std::size_t w, double rti_threshold);

}  // namespace incidents
