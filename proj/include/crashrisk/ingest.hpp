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

#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crashrisk/calendar.hpp"
#include "crashrisk/error.hpp"

namespace crashrisk::ingest {

/// One reported crash.
struct CrashRecord {
  std::string id;
  CivilTime reported_at;
};

/// One calendar day of weather. precip_indicator == (precipitation_in > 0).
struct DailyWeather {
  Date date;
  double precipitation_in = 0.0;
  int precip_indicator = 0;
  std::string conditions;
};

/// One (date, hour) cell of the crash grid.
struct HourlyObservation {
  Date date;
  int hour = 0;
  Weekday weekday = Weekday::Monday;
  int month = 1;
  int crash_count = 0;
  int precip_indicator = 0;
  double precipitation_in = 0.0;

  friend bool operator==(const HourlyObservation&, const HourlyObservation&) = default;
};

struct TimeParts {
  Date date;
  int hour = 0;
  Weekday weekday = Weekday::Monday;
  int month = 1;

  friend bool operator==(const TimeParts&, const TimeParts&) = default;
};

TimeParts derive_time_parts(const CivilTime& ts);

struct CrashColumns {
  std::string id = "OBJECTID";
  std::string reported_at = "REPORTDATE";
};

struct CrashParseReport {
  std::size_t rows_read = 0;
  std::size_t retained = 0;
  std::size_t duplicates = 0;
  std::size_t unparseable = 0;
  std::size_t out_of_range = 0;
};

struct CrashParseResult {
  std::vector<CrashRecord> records;
  CrashParseReport report;
};

/// Reads a crash export. Rows outside `range` are dropped, duplicate ids keep
/// their first occurrence, rows with an empty id or unparseable timestamp are
/// counted and skipped. Throws Error(data) for an empty file or a missing
/// required column.
CrashParseResult parse_crash_csv(std::istream& in, const DateRange& range, const CrashColumns& columns = {});

struct WeatherColumns {
  std::string date = "Datetime";
  std::string precipitation = "Precipitation";
  std::string conditions = "Conditions";
};

struct WeatherParseReport {
  std::size_t rows_read = 0;
  std::size_t duplicates_resolved = 0;
  std::size_t missing_precipitation = 0;
  std::size_t out_of_range = 0;
};

struct WeatherParseResult {
  std::vector<DailyWeather> days;  // sorted by date, one per date
  WeatherParseReport report;
};

/// Raised when the weather file leaves dates of the range uncovered.
class WeatherGapError : public Error {
 public:
  WeatherGapError(std::vector<Date> missing, const std::string& message)
      : Error(ErrorKind::data, "weather_gap", message), missing_(std::move(missing)) {}
  const std::vector<Date>& missing_dates() const { return missing_; }

 private:
  std::vector<Date> missing_;
};

/// Reads daily weather. Duplicate dates (daylight-saving artifacts) keep the
/// record with the larger precipitation, first occurrence on ties. Missing
/// precipitation counts as 0. Every date of `range` must be present.
WeatherParseResult parse_weather_csv(std::istream& in, const DateRange& range, const WeatherColumns& columns = {});

/// Complete zero-filled grid: days(range) * 24 rows ordered by (date, hour).
/// Crashes outside the range are ignored; callers filter with the same range.
std::vector<HourlyObservation> build_hourly_grid(std::span<const CrashRecord> crashes,
                                                 std::span<const DailyWeather> weather, const DateRange& range);

/// Grid CSV with header date,hour,weekday,month,crash_count,precip. The
/// precip column holds the day's precipitation in inches; the indicator is
/// recovered as precip > 0.
void write_grid_csv(std::ostream& out, std::span<const HourlyObservation> grid);
std::vector<HourlyObservation> read_grid_csv(std::istream& in);

inline constexpr const char* kGridHeader = "date,hour,weekday,month,crash_count,precip";

}  // namespace crashrisk::ingest
