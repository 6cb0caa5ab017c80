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

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "crashrisk/calendar.hpp"
#include "crashrisk/features.hpp"
#include "crashrisk/ingest.hpp"

namespace crashrisk::synth {

/// Daily weather: wet with probability `wet_probability`, wet-day amounts
/// Gamma(0.8, 0.3) inches rounded up to 0.01. Substream "weather".
std::vector<ingest::DailyWeather> generate_weather(const DateRange& range, double wet_probability, std::uint64_t seed);

/// Count-model generator: NB2(exp(x'beta), alpha) per grid cell, alpha 0
/// meaning Poisson.
struct CountModel {
  features::FeatureSchema schema;
  std::vector<double> beta;
  double alpha = 0.0;
  double wet_probability = 0.33;
};

/// Zero-count grid over `range` with the given weather, then counts drawn from
/// `model` (substream "counts").
std::vector<ingest::HourlyObservation> generate_grid(const DateRange& range, std::span<const ingest::DailyWeather> weather,
                                                     const CountModel& model, std::uint64_t seed);

/// Weather plus grid from one seed.
std::vector<ingest::HourlyObservation> generate_grid(const DateRange& range, const CountModel& model,
                                                     std::uint64_t seed);

/// One crash record per counted crash, at a random minute of its hour
/// (substream "events"). Ids are 1..N in chronological order.
std::vector<ingest::CrashRecord> crash_events(std::span<const ingest::HourlyObservation> grid, std::uint64_t seed);

/// `n` crashes uniformly over the minutes of `range` (substream "uniform_events").
std::vector<ingest::CrashRecord> uniform_crash_events(const DateRange& range, std::size_t n, std::uint64_t seed);

/// OBJECTID,REPORTDATE with timestamps as "YYYY/MM/DD HH:MM:SS+00".
void write_crash_csv(std::ostream& out, std::span<const ingest::CrashRecord> crashes);
/// Datetime,Precipitation,Conditions.
void write_weather_csv(std::ostream& out, std::span<const ingest::DailyWeather> weather);

/// Reference effects on the log scale for a full-dummy, indicator schema.
inline constexpr double kReferenceHourEffects[24] = {0.420,  0.455,  0.492,  0.353,  0.169,  -0.024, -0.309, -0.428,
                                                     -0.443, -0.348, -0.453, -0.465, -0.385, -0.028, 0.246,  0.323,
                                                     0.289,  0.296,  0.346,  0.254,  0.055,  0.240,  0.366,  0.400};
inline constexpr double kReferenceWeekdayEffects[7] = {0.245, 0.259, 0.269, 0.244, 0.283, 0.259, 0.259};
inline constexpr double kReferenceMonthEffects[12] = {0.042, 0.005, 0.155, 0.192, 0.167, 0.229,
                                                      0.163, 0.149, 0.215, 0.245, 0.157, 0.099};
inline constexpr double kReferencePrecipEffect = 0.027;
/// Baseline log-rate folded into the hour effects of the reference generator.
inline constexpr double kReferenceBaseline = 2.5;
inline constexpr double kReferenceAlpha = 0.005;
inline constexpr double kReferenceWetProbability = 0.33;

/// Full-dummy indicator model with the reference effects.
CountModel reference_model();

/// Calendar effects removed: constant rate exp(kReferenceBaseline) times
/// exp(precip_effect) on wet days.
CountModel precip_only_model(double precip_effect);

}  // namespace crashrisk::synth
