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

#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "incidents/error.hpp"
#include "incidents/geo.hpp"
#include "incidents/random.hpp"

namespace incidents {
namespace {

TEST(HaversineTest, Anchors) {
  EXPECT_EQ(haversine_km({12.5, 40.0}, {12.5, 40.0}), 0.0);
  EXPECT_NEAR(haversine_km({0, 0}, {0, 180}), kEarthRadiusKm * M_PI, 1e-6);
  EXPECT_NEAR(haversine_km({90, 0}, {-90, 0}), kEarthRadiusKm * M_PI, 1e-6);
  EXPECT_NEAR(haversine_km({0, 0}, {0, 1}), kEarthRadiusKm * M_PI / 180.0, 1e-9);
  // Paris to London, about 344 km.
  EXPECT_NEAR(haversine_km({48.8566, 2.3522}, {51.5074, -0.1278}), 343.6, 1.0);
}

TEST(HaversineTest, SymmetricAndTriangle) {
  Rng rng(3);
  auto point = [&] { return GeoPoint{rng.uniform(-90, 90), rng.uniform(-180, 180)}; };
  for (int i = 0; i < 200; ++i) {
    const GeoPoint a = point(), b = point(), c = point();
    EXPECT_NEAR(haversine_km(a, b), haversine_km(b, a), 1e-9);
    EXPECT_LE(haversine_km(a, c), haversine_km(a, b) + haversine_km(b, c) + 1e-6);
  }
}

TEST(DestinationTest, InvertsDistance) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const GeoPoint o{rng.uniform(-70, 70), rng.uniform(-180, 180)};
    const double d = rng.uniform(0, 3000);
    const GeoPoint p = destination_point(o, rng.uniform(0, 360), d);
    EXPECT_TRUE(is_valid(p));
    EXPECT_NEAR(haversine_km(o, p), d, 1e-6);
  }
}

std::vector<Detection> sample_detections() {
  return {
      {"a", "fire", 0.9, GeoPoint{0, 0}, std::nullopt, true},
      {"b", "fire", 0.2, GeoPoint{0, 1}, std::nullopt, false},
      {"c", "flood", 0.95, GeoPoint{10, 10}, std::nullopt, true},
      {"d", "fire", 0.6, std::nullopt, std::nullopt, true},
      {"e", "fire", 0.5, GeoPoint{0, 3}, std::nullopt, false},
  };
}

TEST(FilterTest, StrictThresholdKeepsOrder) {
  const auto d = sample_detections();
  const auto kept = filter_by_confidence(d, "fire", 0.5);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "a");
  EXPECT_EQ(kept[1].id, "d");
  EXPECT_THROW(filter_by_confidence(d, "fire", 1.5), ConfigError);
}

TEST(AccuracyAtKmTest, FractionsByNearestEvent) {
  const auto d = sample_detections();
  const std::vector<GeoEvent> events{{"e1", Date::parse("2018-01-01"), {0, 0}, "fire", {}}};
  const std::vector<double> xs{0.0, 120.0, 1000.0, 2000.0};
  const auto acc = accuracy_at_km(d, events, xs);
  // Located: a (0 km), b (~111 km), c (~1568 km), e (~334 km).
  EXPECT_EQ(acc, (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_THROW(accuracy_at_km(d, std::vector<GeoEvent>{}, xs), DataError);
}

TEST(RadiusGateTest, Inclusive) {
  const auto d = sample_detections();
  const double edge = haversine_km({0, 0}, {0, 1});
  EXPECT_EQ(radius_gate(d, {0, 0}, edge).size(), 2u);
  EXPECT_EQ(radius_gate(d, {0, 0}, edge - 1e-6).size(), 1u);
}

TEST(RadiusGateTest, PlacedPoints) {
  const GeoPoint center{35.0, 139.0};
  const std::vector<Detection> d{
      {"at", "fire", 0.9, center, std::nullopt, std::nullopt},
      {"out", "fire", 0.9, destination_point(center, 42.0, 251.0), std::nullopt, std::nullopt},
      {"in", "fire", 0.9, destination_point(center, 200.0, 249.0), std::nullopt, std::nullopt}};
  const auto kept = radius_gate(d, center, 250.0);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "at");
  EXPECT_EQ(kept[1].id, "in");
  EXPECT_TRUE(radius_gate(std::vector<Detection>{}, center).empty());
}

TEST(AccuracyAtKmTest, ThresholdArithmetic) {
  const GeoPoint event{-8.0, 115.0};
  const std::vector<GeoEvent> events{{"e", Date::parse("2018-08-05"), event, "earthquake", {}}};
  const std::vector<Detection> d{
      {"a", "earthquake", 0.9, destination_point(event, 90.0, 100.0), std::nullopt, std::nullopt}};
  const std::vector<double> xs{50.0, 150.0};
  EXPECT_EQ(accuracy_at_km(d, events, xs), (std::vector<double>{0.0, 1.0}));
}

TEST(EventApTest, BaselineMonteCarloSelfConsistent) {
  Rng rng(17);
  std::vector<Detection> d;
  for (int i = 0; i < 60; ++i) {
    d.push_back({"d" + std::to_string(i), "fire", rng.uniform01(), std::nullopt, std::nullopt,
                 rng.uniform01() < 0.25});
  }
  const double t100 = event_ap(d, "fire", 100, 1).baseline_ap;
  const double t10000 = event_ap(d, "fire", 10000, 2).baseline_ap;
  EXPECT_NEAR(t100, t10000, 0.02);
}

TEST(EventApTest, AgainstShuffleBaseline) {
  const auto d = sample_detections();
  const EventApResult r = event_ap(d, "fire", 50, 9);
  EXPECT_EQ(r.count, 4u);
  EXPECT_EQ(r.positives, 2u);
  EXPECT_DOUBLE_EQ(r.ap, 1.0);
  EXPECT_GT(r.baseline_ap, 0.4);
  EXPECT_LT(r.baseline_ap, 1.0);
  EXPECT_EQ(event_ap(d, "fire", 50, 9).baseline_ap, r.baseline_ap);
  EXPECT_THROW(event_ap(d, "storm"), DataError);
}

TEST(GeoCsvTest, RoundTrip) {
  const std::vector<GeoEvent> events{
      {"quake", Date::parse("2018-09-28"), {-0.18, 119.85}, "earthquake", 7.5},
      {"fire", Date::parse("2018-11-08"), {39.8, -121.4}, "wildfire", std::nullopt}};
  std::stringstream e;
  write_events_csv(events, e);
  const auto back = read_events_csv(e);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].magnitude, 7.5);
  EXPECT_FALSE(back[1].magnitude.has_value());
  EXPECT_EQ(back[1].location, events[1].location);

  const auto d = sample_detections();
  std::stringstream s;
  write_detections_csv(d, s);
  const auto dback = read_detections_csv(s);
  ASSERT_EQ(dback.size(), d.size());
  EXPECT_FALSE(dback[3].location.has_value());
  EXPECT_EQ(dback[1].label, false);
  EXPECT_EQ(dback[4].confidence, 0.5);
}

TEST(GeoCsvTest, ErrorsCarryLineContext) {
  std::istringstream bad_header("name,date\n");
  EXPECT_THROW(read_events_csv(bad_header), DataError);
  std::istringstream bad_row(
      "id,category,confidence,lat,lon,date,label\n"
      "a,fire,0.5,,,,\n"
      "b,fire,zero,,,,\n");
  try {
    read_detections_csv(bad_row, "d.csv");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("d.csv:3"), std::string::npos) << e.what();
  }
  std::istringstream half_location(
      "id,category,confidence,lat,lon,date,label\n"
      "a,fire,0.5,10,,,\n");
  EXPECT_THROW(read_detections_csv(half_location), DataError);
}

}  // namespace
}  // namespace incidents
