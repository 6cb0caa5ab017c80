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

#include "crashrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"
#include "crashrisk/rng.hpp"

namespace crashrisk::synth {

std::vector<ingest::DailyWeather> generate_weather(const DateRange& range, double wet_probability, std::uint64_t seed) {
  if (!(wet_probability >= 0.0 && wet_probability <= 1.0)) {
    throw Error(ErrorKind::usage, "bad_probability", "wet probability must lie in [0, 1]");
  }
  Rng rng = substream(seed, "weather");
  std::vector<ingest::DailyWeather> out;
  out.reserve(static_cast<std::size_t>(range.days()));
  for (std::int64_t i = 0; i < range.days(); ++i) {
    ingest::DailyWeather d;
    d.date = range.at(i);
    const bool wet = rng.uniform() < wet_probability;
    const double amount = rng.gamma(0.8, 0.3);
    if (wet) {
      d.precipitation_in = std::max(0.01, std::ceil(amount * 100.0) / 100.0);
      d.precip_indicator = 1;
      d.conditions = "Rain";
    } else {
      d.conditions = "Clear";
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<ingest::HourlyObservation> generate_grid(const DateRange& range, std::span<const ingest::DailyWeather> weather,
                                                     const CountModel& model, std::uint64_t seed) {
  if (model.beta.size() != model.schema.width()) {
    throw Error(ErrorKind::usage, "dimension_mismatch", "generator coefficients do not match its schema");
  }
  if (!(model.alpha >= 0.0)) throw Error(ErrorKind::usage, "bad_alpha", "generator alpha must be >= 0");
  auto grid = ingest::build_hourly_grid({}, weather, range);
  Rng rng = substream(seed, "counts");
  std::vector<double> x(model.schema.width());
  for (auto& obs : grid) {
    features::encode(features::cell_of(obs, model.schema), model.schema, x);
    double eta = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) eta += x[j] * model.beta[j];
    obs.crash_count = static_cast<int>(rng.negbin2(std::exp(eta), model.alpha));
  }
  return grid;
}

std::vector<ingest::HourlyObservation> generate_grid(const DateRange& range, const CountModel& model,
                                                     std::uint64_t seed) {
  const auto weather = generate_weather(range, model.wet_probability, seed);
  return generate_grid(range, weather, model, seed);
}

std::vector<ingest::CrashRecord> crash_events(std::span<const ingest::HourlyObservation> grid, std::uint64_t seed) {
  Rng rng = substream(seed, "events");
  std::vector<ingest::CrashRecord> out;
  std::vector<int> minutes;
  for (const auto& obs : grid) {
    minutes.clear();
    for (int k = 0; k < obs.crash_count; ++k) minutes.push_back(static_cast<int>(rng.uniform_index(60)));
    std::sort(minutes.begin(), minutes.end());
    for (int m : minutes) out.push_back({std::to_string(out.size() + 1), CivilTime{obs.date, obs.hour, m}});
  }
  return out;
}

std::vector<ingest::CrashRecord> uniform_crash_events(const DateRange& range, std::size_t n, std::uint64_t seed) {
  Rng rng = substream(seed, "uniform_events");
  const auto total_minutes = static_cast<std::uint64_t>(range.days()) * 24 * 60;
  if (total_minutes == 0) throw Error(ErrorKind::usage, "empty_range", "date range is empty");
  std::vector<std::uint64_t> stamps(n);
  for (auto& s : stamps) s = rng.uniform_index(total_minutes);
  std::sort(stamps.begin(), stamps.end());
  std::vector<ingest::CrashRecord> out;
  out.reserve(n);
  for (const auto s : stamps) {
    const auto day = static_cast<std::int64_t>(s / (24 * 60));
    const auto minute_of_day = static_cast<int>(s % (24 * 60));
    out.push_back({std::to_string(out.size() + 1), CivilTime{range.at(day), minute_of_day / 60, minute_of_day % 60}});
  }
  return out;
}

void write_crash_csv(std::ostream& out, std::span<const ingest::CrashRecord> crashes) {
  out << "OBJECTID,REPORTDATE\n";
  char stamp[40];
  for (const auto& c : crashes) {
    const Date d = c.reported_at.date;
    std::snprintf(stamp, sizeof stamp, "%04d/%02d/%02d %02d:%02d:00+00", year_of(d), month_of(d), day_of(d),
                  c.reported_at.hour, c.reported_at.minute);
    out << csv::escape(c.id) << ',' << stamp << '\n';
  }
}

void write_weather_csv(std::ostream& out, std::span<const ingest::DailyWeather> weather) {
  out << "Datetime,Precipitation,Conditions\n";
  for (const auto& d : weather) {
    out << format_date(d.date) << ',' << csv::format_double(d.precipitation_in) << ',' << csv::escape(d.conditions)
        << '\n';
  }
}

CountModel reference_model() {
  CountModel m;
  m.schema = features::full_dummy_schema();
  m.beta.assign(m.schema.width(), 0.0);
  for (int h = 0; h < kHours; ++h) m.beta[*m.schema.hour_column(h)] = kReferenceBaseline + kReferenceHourEffects[h];
  for (int w = 0; w < kWeekdays; ++w) {
    m.beta[*m.schema.weekday_column(static_cast<Weekday>(w))] = kReferenceWeekdayEffects[w];
  }
  for (int mo = 1; mo <= kMonths; ++mo) m.beta[*m.schema.month_column(mo)] = kReferenceMonthEffects[mo - 1];
  m.beta[*m.schema.precip_column()] = kReferencePrecipEffect;
  m.alpha = kReferenceAlpha;
  m.wet_probability = kReferenceWetProbability;
  return m;
}

CountModel precip_only_model(double precip_effect) {
  CountModel m = reference_model();
  std::fill(m.beta.begin(), m.beta.end(), 0.0);
  for (int h = 0; h < kHours; ++h) m.beta[*m.schema.hour_column(h)] = kReferenceBaseline;
  m.beta[*m.schema.precip_column()] = precip_effect;
  return m;
}

}  // namespace crashrisk::synth
