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

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace crashrisk {

using Date = std::chrono::year_month_day;

/// Monday-first weekday, matching the MO..SU column order of the model.
enum class Weekday : std::uint8_t { Monday = 0, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

inline constexpr int kWeekdays = 7;
inline constexpr int kHours = 24;
inline constexpr int kMonths = 12;

/// Local wall-clock time with minute precision. No timezone is attached.
struct CivilTime {
  Date date;
  int hour = 0;
  int minute = 0;
};

/// Closed interval of calendar dates.
struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const;
  /// Number of days in the interval, zero when last < first.
  std::int64_t days() const;
  /// The i-th date of the range, i in [0, days()).
  Date at(std::int64_t i) const;
};

/// The default study window, 2016-01-01 .. 2019-12-31.
DateRange default_study_range();

Date make_date(int y, unsigned m, unsigned d);
Weekday weekday_of(Date d);
int year_of(Date d);
int month_of(Date d);
int day_of(Date d);

std::string_view weekday_code(Weekday w);  // "MO" .. "SU"
std::string_view weekday_name(Weekday w);  // "Monday" .. "Sunday"
std::string_view month_code(int month);    // "JAN" .. "DEC"

/// Accepts "MO", "Monday", "mon" (case-insensitive) or a digit 0-6 (Monday = 0).
std::optional<Weekday> parse_weekday(std::string_view text);

std::string format_date(Date d);  // YYYY-MM-DD

/// Accepts YYYY-MM-DD, YYYY/MM/DD and MM/DD/YYYY.
std::optional<Date> parse_date(std::string_view text);

/// Accepts "YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+hh[:mm]|-hh[:mm]]" and the
/// slash-separated "YYYY/MM/DD HH:MM:SS[+hh]" form. Any UTC offset is
/// ignored: the wall-clock fields are taken as local time.
std::optional<CivilTime> parse_timestamp(std::string_view text);

}  // namespace crashrisk
