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
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crashrisk/calendar.hpp"
#include "crashrisk/features.hpp"
#include "crashrisk/service.hpp"

namespace crashrisk::cli {

enum class FamilyChoice { automatic, poisson, negbin };

/// Fully validated run configuration. Echoed into every output directory.
struct RunConfig {
  std::string command;
  std::optional<std::string> crash;
  std::optional<std::string> weather;
  std::optional<std::string> grid;      // prebuilt grid CSV instead of crash + weather
  std::optional<std::string> model;     // artifact for rank / serve
  std::optional<std::string> forest;    // forest artifact for serve
  std::optional<std::string> out_dir;
  DateRange range = default_study_range();
  features::FeatureSchema schema;
  /// Test fraction; unset means 0.2 for fit and 0.25 for forest. 0 = no test set (fit only).
  std::optional<double> split_frac;
  features::SplitMethod split = features::SplitMethod::random;
  std::uint64_t seed = 20160101;
  FamilyChoice family = FamilyChoice::automatic;
  std::size_t trees = 100;
  std::vector<std::size_t> sweep{1, 5, 10, 25, 50, 100};
  std::size_t threads = 1;
  std::optional<int> month;
  std::optional<std::string> slots;  // "MO:8,FR:17"; all 168 when unset
  std::optional<double> assume_precip;
  bool use_forest = false;
  bool json = false;
  service::Endpoint bind;
  std::optional<std::string> static_dir;
};

/// Builds a config from option values keyed by flag name without dashes
/// ("split-frac"). Throws Error(usage) on any invalid value.
RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& values);

nlohmann::json to_json(const RunConfig& config);

/// Entry point. Returns the process exit code; errors are written to `err`
/// as one JSON line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crashrisk::cli
