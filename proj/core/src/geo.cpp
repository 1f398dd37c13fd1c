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

#include "incidents/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "csv_util.hpp"
#include "incidents/error.hpp"
#include "incidents/eval.hpp"
#include "incidents/random.hpp"

namespace incidents {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::vector<std::string_view> expect_columns(std::string_view line, std::size_t n,
                                             const std::string& context) {
  auto cols = detail::split_csv_line(line);
  if (cols.size() != n) {
    throw DataError(context + "expected " + std::to_string(n) + " columns, got " +
                    std::to_string(cols.size()));
  }
  return cols;
}

std::optional<GeoPoint> parse_location(std::string_view lat, std::string_view lon,
                                       const std::string& context) {
  if (lat.empty() != lon.empty()) throw DataError(context + "lat and lon must appear together");
  if (lat.empty()) return std::nullopt;
  GeoPoint p{detail::parse_double(lat, context), detail::parse_double(lon, context)};
  if (!is_valid(p)) throw DataError(context + "coordinates out of range");
  return p;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return 0.0;
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_km) {
  const double delta = distance_km / kEarthRadiusKm;
  const double theta = bearing_deg * kDegToRad;
  const double phi1 = origin.lat * kDegToRad;
  const double lambda1 = origin.lon * kDegToRad;
  const double sin_phi2 =
      std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  double lon = std::remainder(lambda2 / kDegToRad, 360.0);
  if (lon < -180.0) lon += 360.0;
  if (lon > 180.0) lon -= 360.0;
  return {phi2 / kDegToRad, lon};
}

std::vector<Detection> filter_by_confidence(std::span<const Detection> detections,
                                            std::string_view category, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("confidence threshold must lie in [0, 1]");
  }
  std::vector<Detection> out;
  for (const auto& d : detections) {
    if (d.category == category && d.confidence > threshold) out.push_back(d);
  }
  return out;
}

std::vector<double> accuracy_at_km(std::span<const Detection> detections,
                                   std::span<const GeoEvent> events,
                                   std::span<const double> x_km) {
  if (events.empty()) throw DataError("accuracy_at_km: no events");
  std::vector<double> nearest;
  for (const auto& d : detections) {
    if (!d.location) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : events) best = std::min(best, haversine_km(*d.location, e.location));
    nearest.push_back(best);
  }
  if (nearest.empty()) throw DataError("accuracy_at_km: no geo-tagged detections");
  std::sort(nearest.begin(), nearest.end());
  std::vector<double> out;
  out.reserve(x_km.size());
  for (double x : x_km) {
    const auto within = std::upper_bound(nearest.begin(), nearest.end(), x) - nearest.begin();
    out.push_back(static_cast<double>(within) / static_cast<double>(nearest.size()));
  }
  return out;
}

std::vector<Detection> radius_gate(std::span<const Detection> detections, const GeoPoint& center,
                                   double radius_km) {
  if (!is_valid(center)) throw ConfigError("radius_gate: invalid center");
  std::vector<Detection> out;
  for (const auto& d : detections) {
    if (d.location && haversine_km(*d.location, center) <= radius_km) out.push_back(d);
  }
  return out;
}

EventApResult event_ap(std::span<const Detection> detections, std::string_view category,
                       std::size_t trials, std::uint64_t seed) {
  std::vector<RankedItem> items;
  for (const auto& d : detections) {
    if (d.category != category || !d.label) continue;
    items.push_back({d.confidence, *d.label, items.size()});
  }
  EventApResult result;
  result.trials = trials;
  result.seed = seed;
  result.count = items.size();
  result.positives = static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const RankedItem& it) { return it.positive; }));
  if (result.positives == 0) {
    throw DataError("event_ap: no positive labels for '" + std::string(category) + "'");
  }
  result.ap = *average_precision(items);

  if (trials > 0) {
    Rng rng(seed);
    std::vector<std::size_t> order(items.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(order);
      std::vector<RankedItem> shuffled(items.size());
      for (std::size_t r = 0; r < order.size(); ++r) {
        // Rank r gets a strictly decreasing score.
        shuffled[r] = {static_cast<double>(order.size() - r), items[order[r]].positive, r};
      }
      sum += *average_precision(shuffled);
    }
    result.baseline_ap = sum / static_cast<double>(trials);
  }
  return result;
}

std::vector<GeoEvent> read_events_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty events file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "name,date,lat,lon,category,magnitude") {
    throw DataError(detail::where(source, line_no) + "unexpected events header");
  }
  std::vector<GeoEvent> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = detail::where(source, line_no);
    const auto cols = expect_columns(line, 6, ctx);
    GeoEvent e;
    e.name = std::string(cols[0]);
    try {
      e.date = Date::parse(cols[1]);
    } catch (const DataError& err) {
      throw DataError(ctx + err.what());
    }
    const auto loc = parse_location(cols[2], cols[3], ctx);
    if (!loc) throw DataError(ctx + "event requires lat and lon");
    e.location = *loc;
    e.category = std::string(cols[4]);
    e.magnitude = detail::parse_optional_double(cols[5], ctx);
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<GeoEvent> load_events_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_events_csv(in, path.string());
}

void write_events_csv(std::span<const GeoEvent> events, std::ostream& out) {
  out << "name,date,lat,lon,category,magnitude\n";
  for (const auto& e : events) {
    out << e.name << ',' << e.date.to_string() << ',' << detail::format_double(e.location.lat)
        << ',' << detail::format_double(e.location.lon) << ',' << e.category << ','
        << (e.magnitude ? detail::format_double(*e.magnitude) : std::string()) << '\n';
  }
}

std::vector<Detection> read_detections_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty detections file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,category,confidence,lat,lon,date,label") {
    throw DataError(detail::where(source, line_no) + "unexpected detections header");
  }
  std::vector<Detection> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = detail::where(source, line_no);
    const auto cols = expect_columns(line, 7, ctx);
    Detection d;
    d.id = std::string(cols[0]);
    d.category = std::string(cols[1]);
    d.confidence = detail::parse_double(cols[2], ctx);
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw DataError(ctx + "confidence outside [0, 1]");
    }
    d.location = parse_location(cols[3], cols[4], ctx);
    if (!cols[5].empty()) {
      try {
        d.date = Date::parse(cols[5]);
      } catch (const DataError& err) {
        throw DataError(ctx + err.what());
      }
    }
    if (cols[6] == "1") {
      d.label = true;
    } else if (cols[6] == "0") {
      d.label = false;
    } else if (!cols[6].empty()) {
      throw DataError(ctx + "label must be 0, 1 or empty");
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> load_detections_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_detections_csv(in, path.string());
}

void write_detections_csv(std::span<const Detection> detections, std::ostream& out) {
  out << "id,category,confidence,lat,lon,date,label\n";
  for (const auto& d : detections) {
    out << d.id << ',' << d.category << ',' << detail::format_double(d.confidence) << ',';
    if (d.location) {
      out << detail::format_double(d.location->lat) << ',' << detail::format_double(d.location->lon);
    } else {
      out << ',';
    }
    out << ',' << (d.date ? d.date->to_string() : std::string()) << ','
        << (d.label ? (*d.label ? "1" : "0") : "") << '\n';
  }
}

}  // namespace incidents
