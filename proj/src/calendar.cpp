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

#include "crashrisk/calendar.hpp"

#include <array>
#include <cstdio>
#include <cctype>
#include <charconv>

namespace crashrisk {

namespace chr = std::chrono;

namespace {

constexpr std::array<std::string_view, 7> kWeekdayCodes = {"MO", "TU", "WE", "TH", "FR", "SA", "SU"};
constexpr std::array<std::string_view, 7> kWeekdayNames = {"Monday", "Tuesday",  "Wednesday", "Thursday",
                                                           "Friday", "Saturday", "Sunday"};
constexpr std::array<std::string_view, 12> kMonthCodes = {"JAN", "FEB", "MAR", "APR", "MAY", "JUN",
                                                          "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};

// Parses exactly `width` digits at `pos`, advancing it.
bool take_digits(std::string_view s, std::size_t& pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  pos += width;
  return true;
}

// Parses 1 or 2 digits.
bool take_short(std::string_view s, std::size_t& pos, int& out) {
  if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) return false;
  int v = s[pos++] - '0';
  if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) v = v * 10 + (s[pos++] - '0');
  out = v;
  return true;
}

bool take_char(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

std::optional<Date> checked(int y, int m, int d) {
  const Date date{chr::year{y}, chr::month{static_cast<unsigned>(m)}, chr::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

// Date prefix of a timestamp: YYYY-MM-DD or YYYY/MM/DD.
std::optional<Date> take_iso_date(std::string_view s, std::size_t& pos) {
  int y = 0, m = 0, d = 0;
  if (!take_digits(s, pos, 4, y)) return std::nullopt;
  if (pos >= s.size() || (s[pos] != '-' && s[pos] != '/')) return std::nullopt;
  const char sep = s[pos++];
  if (!take_short(s, pos, m) || !take_char(s, pos, sep) || !take_short(s, pos, d)) return std::nullopt;
  return checked(y, m, d);
}

}  // namespace

bool DateRange::contains(Date d) const { return d >= first && d <= last; }

std::int64_t DateRange::days() const {
  const auto n = (chr::sys_days{last} - chr::sys_days{first}).count() + 1;
  return n > 0 ? n : 0;
}

Date DateRange::at(std::int64_t i) const { return Date{chr::sys_days{first} + chr::days{i}}; }

DateRange default_study_range() { return {make_date(2016, 1, 1), make_date(2019, 12, 31)}; }

Date make_date(int y, unsigned m, unsigned d) { return Date{chr::year{y}, chr::month{m}, chr::day{d}}; }

Weekday weekday_of(Date d) {
  // c_encoding: Sunday = 0.
  const unsigned c = chr::weekday{chr::sys_days{d}}.c_encoding();
  return static_cast<Weekday>((c + 6) % 7);
}

int year_of(Date d) { return static_cast<int>(d.year()); }
int month_of(Date d) { return static_cast<int>(static_cast<unsigned>(d.month())); }
int day_of(Date d) { return static_cast<int>(static_cast<unsigned>(d.day())); }

std::string_view weekday_code(Weekday w) { return kWeekdayCodes[static_cast<std::size_t>(w)]; }
std::string_view weekday_name(Weekday w) { return kWeekdayNames[static_cast<std::size_t>(w)]; }

std::string_view month_code(int month) {
  if (month < 1 || month > 12) return "???";
  return kMonthCodes[static_cast<std::size_t>(month - 1)];
}

std::optional<Weekday> parse_weekday(std::string_view text) {
  std::string lower;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower.size() == 1 && lower[0] >= '0' && lower[0] <= '6') return static_cast<Weekday>(lower[0] - '0');
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
    std::string name;
    for (char c : kWeekdayNames[i]) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::string code = name.substr(0, 2);
    if (lower == name || lower == code || lower == name.substr(0, 3)) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  std::size_t pos = 0;
  if (auto d = take_iso_date(text, pos); d && pos == text.size()) return d;
  // MM/DD/YYYY
  pos = 0;
  int y = 0, m = 0, d = 0;
  if (take_short(text, pos, m) && take_char(text, pos, '/') && take_short(text, pos, d) && take_char(text, pos, '/') &&
      take_digits(text, pos, 4, y) && pos == text.size()) {
    return checked(y, m, d);
  }
  return std::nullopt;
}

std::optional<CivilTime> parse_timestamp(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  std::size_t pos = 0;
  const auto date = take_iso_date(text, pos);
  if (!date) return std::nullopt;
  CivilTime t{*date, 0, 0};
  if (pos == text.size()) return t;  // date only: midnight
  if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
  ++pos;
  int hour = 0, minute = 0, second = 0;
  if (!take_digits(text, pos, 2, hour) || !take_char(text, pos, ':') || !take_digits(text, pos, 2, minute)) {
    return std::nullopt;
  }
  if (take_char(text, pos, ':')) {
    if (!take_digits(text, pos, 2, second)) return std::nullopt;
    if (take_char(text, pos, '.')) {
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
  }
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  if (pos < text.size()) {
    // Offset suffix: Z, +hh, +hhmm, +hh:mm (and the minus forms).
    if (text[pos] == 'Z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      ++pos;
      int oh = 0, om = 0;
      if (!take_digits(text, pos, 2, oh)) return std::nullopt;
      take_char(text, pos, ':');
      if (pos < text.size() && !take_digits(text, pos, 2, om)) return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
  }
  t.hour = hour;
  t.minute = minute;
  return t;
}

}  // namespace crashrisk
