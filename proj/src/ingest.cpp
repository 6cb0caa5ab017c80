// Copyright 2026 The crashrisk Authors
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

#include "crashrisk/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>
#include <unordered_set>

#include "crashrisk/csv.hpp"

namespace crashrisk::ingest {

namespace {

std::size_t require_column(const csv::Header& header, const std::string& name, const char* what) {
  const auto idx = header.find(name);
  if (!idx) {
    throw Error(ErrorKind::data, "missing_column",
                std::string(what) + " CSV is missing required column '" + name + "'");
  }
  return *idx;
}

csv::Header read_header(csv::Reader& reader, const char* what) {
  std::vector<std::string> fields;
  if (!reader.next(fields) || (fields.size() == 1 && csv::trim(fields[0]).empty())) {
    throw Error(ErrorKind::data, "empty_file", std::string(what) + " CSV is empty");
  }
  return csv::Header(std::move(fields));
}

}  // namespace

TimeParts derive_time_parts(const CivilTime& ts) {
  return TimeParts{ts.date, ts.hour, weekday_of(ts.date), month_of(ts.date)};
}

CrashParseResult parse_crash_csv(std::istream& in, const DateRange& range, const CrashColumns& columns) {
  csv::Reader reader(in);
  const auto header = read_header(reader, "crash");
  const std::size_t id_col = require_column(header, columns.id, "crash");
  const std::size_t ts_col = require_column(header, columns.reported_at, "crash");

  CrashParseResult result;
  std::unordered_set<std::string> seen;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++result.report.rows_read;
    if (fields.size() <= std::max(id_col, ts_col)) {
      ++result.report.unparseable;
      continue;
    }
    const std::string id(csv::trim(fields[id_col]));
    const auto ts = parse_timestamp(fields[ts_col]);
    if (id.empty() || !ts) {
      ++result.report.unparseable;
      continue;
    }
    if (!range.contains(ts->date)) {
      ++result.report.out_of_range;
      continue;
    }
    if (!seen.insert(id).second) {
      ++result.report.duplicates;
      continue;
    }
    result.records.push_back(CrashRecord{id, *ts});
  }
  result.report.retained = result.records.size();
  return result;
}

WeatherParseResult parse_weather_csv(std::istream& in, const DateRange& range, const WeatherColumns& columns) {
  csv::Reader reader(in);
  const auto header = read_header(reader, "weather");
  const std::size_t date_col = require_column(header, columns.date, "weather");
  const std::size_t precip_col = require_column(header, columns.precipitation, "weather");
  const std::size_t cond_col = require_column(header, columns.conditions, "weather");

  WeatherParseResult result;
  std::map<std::chrono::sys_days, DailyWeather> by_date;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    ++result.report.rows_read;
    if (fields.size() <= date_col) {
      throw Error(ErrorKind::data, "bad_row", "weather CSV line " + std::to_string(reader.line()) + ": too few fields");
    }
    const auto date = parse_date(fields[date_col]);
    if (!date) {
      throw Error(ErrorKind::data, "bad_date",
                  "weather CSV line " + std::to_string(reader.line()) + ": cannot parse date '" + fields[date_col] + "'");
    }
    if (!range.contains(*date)) {
      ++result.report.out_of_range;
      continue;
    }
    DailyWeather day;
    day.date = *date;
    const std::string_view precip_text = precip_col < fields.size() ? csv::trim(fields[precip_col]) : "";
    if (precip_text.empty()) {
      ++result.report.missing_precipitation;
    } else {
      const auto v = csv::parse_double(precip_text);
      if (!v || *v < 0.0) {
        throw Error(ErrorKind::data, "bad_precipitation",
                    "weather CSV line " + std::to_string(reader.line()) + ": invalid precipitation '" +
                        std::string(precip_text) + "'");
      }
      day.precipitation_in = *v;
    }
    day.precip_indicator = day.precipitation_in > 0.0 ? 1 : 0;
    if (cond_col < fields.size()) day.conditions = std::string(csv::trim(fields[cond_col]));

    const std::chrono::sys_days key{*date};
    auto [it, inserted] = by_date.try_emplace(key, day);
    if (!inserted) {
      ++result.report.duplicates_resolved;
      if (day.precipitation_in > it->second.precipitation_in) it->second = std::move(day);
    }
  }

  std::vector<Date> missing;
  for (std::int64_t i = 0; i < range.days(); ++i) {
    const Date d = range.at(i);
    if (!by_date.contains(std::chrono::sys_days{d})) missing.push_back(d);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "weather data missing " << missing.size() << " date(s):";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg << ' ' << format_date(missing[i]);
    if (shown < missing.size()) msg << " ...";
    throw WeatherGapError(std::move(missing), msg.str());
  }
  result.days.reserve(by_date.size());
  for (auto& [key, day] : by_date) result.days.push_back(std::move(day));
  return result;
}

std::vector<HourlyObservation> build_hourly_grid(std::span<const CrashRecord> crashes,
                                                 std::span<const DailyWeather> weather, const DateRange& range) {
  const std::int64_t n_days = range.days();
  const std::chrono::sys_days first{range.first};
  std::vector<const DailyWeather*> day_weather(static_cast<std::size_t>(n_days), nullptr);
  for (const auto& w : weather) {
    if (!range.contains(w.date)) continue;
    day_weather[static_cast<std::size_t>((std::chrono::sys_days{w.date} - first).count())] = &w;
  }
  std::vector<Date> missing;
  for (std::int64_t i = 0; i < n_days; ++i) {
    if (!day_weather[static_cast<std::size_t>(i)]) missing.push_back(range.at(i));
  }
  if (!missing.empty()) {
    throw WeatherGapError(missing, "weather data missing " + std::to_string(missing.size()) +
                                       " date(s), first " + format_date(missing.front()));
  }

  std::vector<HourlyObservation> grid(static_cast<std::size_t>(n_days) * kHours);
  for (std::int64_t i = 0; i < n_days; ++i) {
    const Date d = range.at(i);
    const DailyWeather& w = *day_weather[static_cast<std::size_t>(i)];
    const Weekday wd = weekday_of(d);
    const int month = month_of(d);
    for (int h = 0; h < kHours; ++h) {
      auto& obs = grid[static_cast<std::size_t>(i) * kHours + static_cast<std::size_t>(h)];
      obs.date = d;
      obs.hour = h;
      obs.weekday = wd;
      obs.month = month;
      obs.precip_indicator = w.precip_indicator;
      obs.precipitation_in = w.precipitation_in;
    }
  }
  for (const auto& c : crashes) {
    if (!range.contains(c.reported_at.date)) continue;
    const auto day = (std::chrono::sys_days{c.reported_at.date} - first).count();
    ++grid[static_cast<std::size_t>(day) * kHours + static_cast<std::size_t>(c.reported_at.hour)].crash_count;
  }
  return grid;
}

void write_grid_csv(std::ostream& out, std::span<const HourlyObservation> grid) {
  out << kGridHeader << '\n';
  for (const auto& o : grid) {
    out << format_date(o.date) << ',' << o.hour << ',' << weekday_code(o.weekday) << ',' << o.month << ','
        << o.crash_count << ',' << csv::format_double(o.precipitation_in) << '\n';
  }
}

std::vector<HourlyObservation> read_grid_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto header = read_header(reader, "grid");
  const std::size_t c_date = require_column(header, "date", "grid");
  const std::size_t c_hour = require_column(header, "hour", "grid");
  const std::size_t c_count = require_column(header, "crash_count", "grid");
  const std::size_t c_precip = require_column(header, "precip", "grid");

  std::vector<HourlyObservation> grid;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    auto bad = [&](const char* what) {
      return Error(ErrorKind::data, "bad_row", "grid CSV line " + std::to_string(reader.line()) + ": " + what);
    };
    if (fields.size() < header.names().size()) throw bad("too few fields");
    HourlyObservation o;
    const auto date = parse_date(fields[c_date]);
    const auto hour = csv::parse_int(fields[c_hour]);
    const auto count = csv::parse_int(fields[c_count]);
    const auto precip = csv::parse_double(fields[c_precip]);
    if (!date) throw bad("invalid date");
    if (!hour || *hour < 0 || *hour > 23) throw bad("invalid hour");
    if (!count || *count < 0) throw bad("invalid crash_count");
    if (!precip || *precip < 0.0) throw bad("invalid precip");
    o.date = *date;
    o.hour = static_cast<int>(*hour);
    o.weekday = weekday_of(*date);
    o.month = month_of(*date);
    o.crash_count = static_cast<int>(*count);
    o.precipitation_in = *precip;
    o.precip_indicator = *precip > 0.0 ? 1 : 0;
    grid.push_back(o);
  }
  return grid;
}

}  // namespace crashrisk::ingest
