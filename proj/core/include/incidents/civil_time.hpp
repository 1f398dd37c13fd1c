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

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace incidents {

/// A UTC calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int64_t days_since_epoch)
      : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);

  // Strict "YYYY-MM-DD". Throws DataError.
  static Date parse(std::string_view text);

  constexpr std::int64_t days_since_epoch() const { return days_; }
  std::string to_string() const;

  constexpr Date operator+(std::int64_t days) const { return Date(days_ + days); }
  constexpr Date operator-(std::int64_t days) const { return Date(days_ - days); }
  constexpr std::int64_t operator-(Date other) const { return days_ - other.days_; }

  friend constexpr auto operator<=>(Date, Date) = default;

 private:
  std::int64_t days_ = 0;
};

using Timestamp = std::chrono::sys_seconds;

// RFC 3339 date-time, e.g. "2018-07-20T13:05:00Z" or with a numeric offset.
// Fractional seconds are accepted and truncated. Throws DataError.
Timestamp parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp ts);

Date date_of(Timestamp ts);

}  // namespace incidents
