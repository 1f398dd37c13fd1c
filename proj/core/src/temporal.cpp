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

#include "incidents/temporal.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "csv_util.hpp"
#include "incidents/error.hpp"

namespace incidents {
namespace {

std::uint64_t parse_count(std::string_view text, const std::string& context) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(context + "invalid count '" + std::string(text) + "'");
  }
  return value;
}

double sum_range(const DailySeries& s, Date from, Date to) {
  double total = 0.0;
  for (Date d = from; d <= to; d = d + 1) total += static_cast<double>(s.at(d));
  return total;
}

std::vector<double> normalized_over(const DailySeries& s, Date from, std::size_t n) {
  std::vector<double> out(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(s.at(from + static_cast<std::int64_t>(i)));
    total += out[i];
  }
  if (total > 0.0) {
    for (double& v : out) v /= total;
  }
  return out;
}

void renormalize(std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  if (total > 0.0) {
    for (double& v : values) v /= total;
  }
}

}  // namespace

std::uint64_t DailySeries::at(Date day) const {
  return covers(day) ? counts[static_cast<std::size_t>(day - start)] : 0;
}

DailySeries read_series_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError(source + ": empty series file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,count") throw DataError(detail::where(source, 1) + "unexpected series header");
  DailySeries series;
  std::optional<Date> previous;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = detail::where(source, line_no);
    const auto cols = detail::split_csv_line(line);
    if (cols.size() != 2) throw DataError(ctx + "expected 2 columns");
    Date day;
    try {
      day = Date::parse(cols[0]);
    } catch (const DataError& err) {
      throw DataError(ctx + err.what());
    }
    const std::uint64_t count = parse_count(cols[1], ctx);
    if (previous && day <= *previous) throw DataError(ctx + "dates must be strictly increasing");
    if (!previous) {
      series.start = day;
    } else {
      for (Date gap = *previous + 1; gap < day; gap = gap + 1) series.counts.push_back(0);
    }
    series.counts.push_back(count);
    previous = day;
  }
  return series;
}

DailySeries load_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_series_csv(in, path.string());
}

void write_series_csv(const DailySeries& series, std::ostream& out) {
  out << "date,count\n";
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    out << (series.start + static_cast<std::int64_t>(i)).to_string() << ',' << series.counts[i]
        << '\n';
  }
}

DailySeries daily_counts(std::span<const Detection> detections, std::string_view category) {
  std::map<Date, std::uint64_t> per_day;
  for (const auto& d : detections) {
    if (d.category == category && d.date) ++per_day[*d.date];
  }
  if (per_day.empty()) {
    throw DataError("no dated detections for '" + std::string(category) + "'");
  }
  DailySeries series;
  series.category = std::string(category);
  series.start = per_day.begin()->first;
  series.counts.assign(static_cast<std::size_t>(per_day.rbegin()->first - series.start) + 1, 0);
  for (const auto& [day, n] : per_day) series.counts[static_cast<std::size_t>(day - series.start)] = n;
  return series;
}

std::optional<double> rti(const DailySeries& series, Date event_day, std::size_t w) {
  const auto iw = static_cast<std::int64_t>(w);
  if (!series.covers(event_day - iw) || !series.covers(event_day + iw)) {
    throw DataError("series does not cover " + (event_day - iw).to_string() + " to " +
                    (event_day + iw).to_string());
  }
  const double after = sum_range(series, event_day, event_day + iw);
  const double before = sum_range(series, event_day - iw, event_day);
  if (before == 0.0) return std::nullopt;
  return after / before;
}

MrtiReport mrti(const DailySeries& series, std::span<const GeoEvent> events, std::size_t w) {
  MrtiReport report;
  double sum = 0.0;
  for (const auto& e : events) {
    EventRti entry{e.name, e.date, std::nullopt, {}};
    try {
      entry.rti = rti(series, e.date, w);
      if (!entry.rti) entry.reason = "zero denominator";
    } catch (const DataError&) {
      entry.reason = "insufficient coverage";
    }
    if (entry.rti) {
      sum += *entry.rti;
      ++report.defined;
    } else {
      report.undefined.push_back(e.name);
    }
    report.events.push_back(std::move(entry));
  }
  if (report.defined == 0) throw DataError("mRTI undefined: no event has a defined RTI");
  report.mrti = sum / static_cast<double>(report.defined);
  return report;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw ConfigError("smoothing window must be odd");
  const std::size_t half = window / 2;
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double total = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) total += values[j];
    out[i] = total / static_cast<double>(hi - lo + 1);
  }
  return out;
}

double histogram_iou(const DailySeries& a, const DailySeries& b, std::size_t smooth_window) {
  if (smooth_window == 0 || smooth_window % 2 == 0) {
    throw ConfigError("smoothing window must be odd");
  }
  if (a.empty() && b.empty()) throw DataError("histogram_iou: both series are empty");
  Date from = a.empty() ? b.start : b.empty() ? a.start : std::min(a.start, b.start);
  Date to = a.empty() ? b.last() : b.empty() ? a.last() : std::max(a.last(), b.last());
  const auto n = static_cast<std::size_t>(to - from) + 1;
  auto x = normalized_over(a, from, n);
  auto y = normalized_over(b, from, n);
  const bool x_zero = std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
  const bool y_zero = std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
  if (x_zero && y_zero) throw DataError("histogram_iou: both series are all zero");
  x = moving_average(x, smooth_window);
  y = moving_average(y, smooth_window);
  renormalize(x);
  renormalize(y);
  double mins = 0.0, maxs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mins += std::min(x[i], y[i]);
    maxs += std::max(x[i], y[i]);
  }
  return maxs > 0.0 ? mins / maxs : 0.0;
}

std::vector<Date> flag_peaks(const DailySeries& series, std::size_t w, double rti_threshold) {
  std::vector<Date> peaks;
  const std::size_t n = series.size();
  if (n <= 2 * w) return peaks;
  const auto jump = [&](std::size_t i) {
    return i == 0 ? std::numeric_limits<double>::lowest()
                  : static_cast<double>(series.counts[i]) - static_cast<double>(series.counts[i - 1]);
  };
  for (std::size_t i = w; i + w < n; ++i) {
    const double j = jump(i);
    if (!(j > 0.0)) continue;
    bool best = true;
    for (std::size_t k = i - w; k <= i + w && best; ++k) {
      const double other = jump(k);
      if (other > j || (other == j && k < i)) best = false;
    }
    if (!best) continue;
    const Date day = series.start + static_cast<std::int64_t>(i);
    const auto value = rti(series, day, w);
    if (value && *value >= rti_threshold) peaks.push_back(day);
  }
  return peaks;
}

}  // namespace incidents
