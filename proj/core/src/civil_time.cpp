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

#include "incidents/civil_time.hpp"

#include <charconv>
#include <cstdio>

#include "incidents/error.hpp"

namespace incidents {
namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t len,
                 std::string_view whole) {
  if (pos + len > text.size()) {
    throw DataError("malformed date-time '" + std::string(whole) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') {
      throw DataError("malformed date-time '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c,
                 std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError("malformed date-time '" + std::string(whole) + "'");
  }
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year(year),
                                        std::chrono::month(month),
                                        std::chrono::day(day)};
  if (!ymd.ok()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    throw DataError(std::string("invalid calendar date ") + buf);
  }
  return Date(std::chrono::sys_days(ymd).time_since_epoch().count());
}

Date Date::parse(std::string_view text) {
  if (text.size() != 10) {
    throw DataError("malformed date '" + std::string(text) + "' (want YYYY-MM-DD)");
  }
  const int y = parse_digits(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int m = parse_digits(text, 5, 2, text);
  expect_char(text, 7, '-', text);
  const int d = parse_digits(text, 8, 2, text);
  return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const {
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days(std::chrono::days(days_))};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  if (text.size() < 20) {
    throw DataError("malformed date-time '" + std::string(text) + "'");
  }
  const Date date = Date::parse(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
    throw DataError("malformed date-time '" + std::string(text) + "'");
  }
  const int hh = parse_digits(text, 11, 2, text);
  expect_char(text, 13, ':', text);
  const int mm = parse_digits(text, 14, 2, text);
  expect_char(text, 16, ':', text);
  const int ss = parse_digits(text, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 60) {
    throw DataError("time of day out of range in '" + std::string(text) + "'");
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) {
      throw DataError("malformed fractional seconds in '" + std::string(text) + "'");
    }
  }
  std::int64_t offset_seconds = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = parse_digits(text, pos + 1, 2, text);
    expect_char(text, pos + 3, ':', text);
    const int om = parse_digits(text, pos + 4, 2, text);
    offset_seconds = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    throw DataError("missing UTC offset in '" + std::string(text) + "'");
  }
  if (pos != text.size()) {
    throw DataError("trailing characters in date-time '" + std::string(text) + "'");
  }
  const std::int64_t seconds = date.days_since_epoch() * 86400 + hh * 3600 +
                               mm * 60 + ss - offset_seconds;
  return Timestamp(std::chrono::seconds(seconds));
}

std::string format_rfc3339(Timestamp ts) {
  const auto day = std::chrono::floor<std::chrono::days>(ts);
  const std::int64_t secs = (ts - day).count();
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02d:%02d:%02dZ", static_cast<int>(secs / 3600),
                static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
  return Date(day.time_since_epoch().count()).to_string() + buf;
}

Date date_of(Timestamp ts) {
  return Date(std::chrono::floor<std::chrono::days>(ts).time_since_epoch().count());
}

}  // namespace incidents
