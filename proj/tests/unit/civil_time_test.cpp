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

#include "incidents/civil_time.hpp"
#include "incidents/error.hpp"

namespace incidents {
namespace {

TEST(DateTest, EpochAndRoundTrip) {
  EXPECT_EQ(Date::from_ymd(1970, 1, 1).days_since_epoch(), 0);
  EXPECT_EQ(Date::from_ymd(2018, 7, 20).to_string(), "2018-07-20");
  EXPECT_EQ(Date::parse("2000-02-29"), Date::from_ymd(2000, 2, 29));
  EXPECT_EQ(Date::parse("2018-12-31") + 1, Date::parse("2019-01-01"));
  EXPECT_EQ(Date::parse("2018-03-01") - Date::parse("2018-02-01"), 28);
}

TEST(DateTest, RejectsMalformedText) {
  EXPECT_THROW(Date::parse("2018-7-20"), DataError);
  EXPECT_THROW(Date::parse("2019-02-29"), DataError);
  EXPECT_THROW(Date::parse("2018-13-01"), DataError);
  EXPECT_THROW(Date::parse("20180720"), DataError);
  EXPECT_THROW(Date::parse(""), DataError);
}

TEST(TimestampTest, ParsesOffsetsToUtc) {
  const Timestamp z = parse_rfc3339("2018-07-20T13:05:00Z");
  EXPECT_EQ(format_rfc3339(z), "2018-07-20T13:05:00Z");
  EXPECT_EQ(parse_rfc3339("2018-07-20T15:05:00+02:00"), z);
  EXPECT_EQ(parse_rfc3339("2018-07-20T13:05:00.750Z"), z);
  EXPECT_EQ(parse_rfc3339("2018-07-20 13:05:00Z"), z);
  EXPECT_EQ(date_of(parse_rfc3339("2018-07-20T23:30:00-01:00")), Date::parse("2018-07-21"));
}

TEST(TimestampTest, RequiresZone) {
  EXPECT_THROW(parse_rfc3339("2018-07-20T13:05:00"), DataError);
  EXPECT_THROW(parse_rfc3339("2018-07-20X13:05:00Z"), DataError);
  EXPECT_THROW(parse_rfc3339("2018-07-20T25:05:00Z"), DataError);
}

}  // namespace
}  // namespace incidents
