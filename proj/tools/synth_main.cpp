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

// Writes synthetic crash and weather exports for demos and tests.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "crashrisk/calendar.hpp"
#include "crashrisk/error.hpp"
#include "crashrisk/synth.hpp"

using namespace crashrisk;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic crash and weather exports"};
  std::string out_dir = "synth", from = "2016-01-01", to = "2019-12-31", generator = "reference";
  std::uint64_t seed = 20160101;
  std::size_t events = 10000;
  double precip_effect = 0.5;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--from", from);
  app.add_option("--to", to);
  app.add_option("--seed", seed);
  app.add_option("--generator", generator, "reference | precip-only | uniform")
      ->check(CLI::IsMember({"reference", "precip-only", "uniform"}));
  app.add_option("--events", events, "crash count for the uniform generator");
  app.add_option("--precip-effect", precip_effect, "log-rate effect of a wet day for precip-only");
  CLI11_PARSE(app, argc, argv);

  const auto first = parse_date(from);
  const auto last = parse_date(to);
  if (!first || !last || *last < *first) {
    std::cerr << "{\"error\":{\"kind\":\"usage\",\"code\":\"bad_range\",\"message\":\"invalid --from/--to\"}}\n";
    return 2;
  }
  const DateRange range{*first, *last};
  try {
    std::vector<ingest::DailyWeather> weather;
    std::vector<ingest::CrashRecord> crashes;
    if (generator == "uniform") {
      weather = synth::generate_weather(range, synth::kReferenceWetProbability, seed);
      crashes = synth::uniform_crash_events(range, events, seed);
    } else {
      const auto model = generator == "reference" ? synth::reference_model() : synth::precip_only_model(precip_effect);
      weather = synth::generate_weather(range, model.wet_probability, seed);
      crashes = synth::crash_events(synth::generate_grid(range, weather, model, seed), seed);
    }
    std::filesystem::create_directories(out_dir);
    std::ofstream c(std::filesystem::path(out_dir) / "crashes.csv", std::ios::binary);
    synth::write_crash_csv(c, crashes);
    std::ofstream w(std::filesystem::path(out_dir) / "weather.csv", std::ios::binary);
    synth::write_weather_csv(w, weather);
    std::cout << crashes.size() << " crashes, " << weather.size() << " days written to " << out_dir << '\n';
  } catch (const Error& e) {
    std::cerr << "{\"error\":{\"kind\":\"" << kind_name(e.kind()) << "\",\"code\":\"" << e.code() << "\"}}\n";
    return exit_code(e.kind());
  }
  return 0;
}
