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

namespace incidents {

// Mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Point reached by travelling `distance_km` from `origin` along the initial
// `bearing_deg` (clockwise from north).
GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_km);

struct GeoEvent {
  std::string name;
  Date date;
  GeoPoint location;
  std::string category;
  std::optional<double> magnitude;
};

struct Detection {
  std::string id;
  std::string category;
  double confidence = 0.0;
  std::optional<GeoPoint> location;
  std::optional<Date> date;
  // Human relevance label, when one was collected.
  std::optional<bool> label;
};

// Keeps detections of `category` whose confidence is strictly above
// `threshold`, preserving order.
std::vector<Detection> filter_by_confidence(std::span<const Detection> detections,
                                            std::string_view category, double threshold);

/// Accuracy@XKm: for each X, the fraction of detections whose distance to the
/// nearest event is <= X km. Detections without a location are ignored; throws
/// DataError if none has one or if `events` is empty.
std::vector<double> accuracy_at_km(std::span<const Detection> detections,
                                   std::span<const GeoEvent> events,
                                   std::span<const double> x_km);

inline constexpr double kDefaultGateRadiusKm = 250.0;

// Geo-tagged detections within `radius_km` of `center` (inclusive).
std::vector<Detection> radius_gate(std::span<const Detection> detections,
                                   const GeoPoint& center,
                                   double radius_km = kDefaultGateRadiusKm);

inline constexpr std::size_t kDefaultShuffleTrials = 100;

struct EventApResult {
  double ap = 0.0;
  // Mean AP over seeded random orderings of the same labels.
  double baseline_ap = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t positives = 0;
  std::size_t count = 0;
};

// AP of the confidence ranking of labelled `category` detections against a
// random-shuffle baseline. Throws DataError when no positive label exists.
EventApResult event_ap(std::span<const Detection> detections, std::string_view category,
                       std::size_t trials = kDefaultShuffleTrials, std::uint64_t seed = 0);

// CSV with header name,date,lat,lon,category,magnitude.
std::vector<GeoEvent> read_events_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<GeoEvent> load_events_csv(const std::filesystem::path& path);
void write_events_csv(std::span<const GeoEvent> events, std::ostream& out);

// CSV with header id,category,confidence,lat,lon,date,label; the last four
// columns may be empty.
std::vector<Detection> read_detections_csv(std::istream& in,
                                           const std::string& source = "<stream>");
std::vector<Detection> load_detections_csv(const std::filesystem::path& path);
void write_detections_csv(std::span<const Detection> detections, std::ostream& out);

}  // namespace incidents
