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

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "crashrisk/calendar.hpp"
#include "crashrisk/forest.hpp"
#include "crashrisk/glm.hpp"
#include "crashrisk/ingest.hpp"

namespace crashrisk::advisor {

/// Printed with every ranking: counts are not normalized by traffic volume.
inline constexpr const char* kExposureCaveat =
    "Expected crash counts are not normalized by traffic volume; a low count can reflect low exposure.";

/// Coefficient table: one row per model coefficient plus, under reference-cell
/// coding, one row per reference level (coefficient 0, reference = true), in
/// column-layout order. Crash totals and shares are computed from `grid`.
std::vector<glm::CoefficientRow> summarize(const glm::FittedGlm& model,
                                           std::span<const ingest::HourlyObservation> grid);

inline constexpr const char* kSummaryHeader =
    "name,coefficient,exp_coef,percent_change,std_err,z,p_value,crash_total,crash_share";

void write_summary_csv(std::ostream& out, std::span<const glm::CoefficientRow> rows);

enum class Category { hour, weekday, month };

/// Per-level coefficients of one category, ready for bar plots:
/// level,coefficient,exp_coef,percent_change,std_err,p_value,reference
void write_category_csv(std::ostream& out, std::span<const glm::CoefficientRow> rows, Category category);

struct Slot {
  Weekday weekday = Weekday::Monday;
  int hour = 0;
  int month = 1;
  friend bool operator==(const Slot&, const Slot&) = default;
};

struct SlotQuery {
  std::vector<Slot> slots;
  /// 0/1 under the indicator schema, inches otherwise. Unset: 0 for GLMs,
  /// the training mean for forests.
  std::optional<double> precip;
};

struct RankedSlot {
  Slot slot;
  double expected_count = 0.0;
  int rank = 0;  // 1-based
  double relative_risk = 1.0;  // expected_count / smallest expected_count
  friend bool operator==(const RankedSlot&, const RankedSlot&) = default;
};

/// Throws Error(usage, ...) naming the offending field.
void validate_query(const SlotQuery& query, const features::FeatureSchema& schema);

/// Ascending expected count (log-link: ascending linear predictor); ties go to
/// the earlier hour, then the earlier weekday.
std::vector<RankedSlot> rank_slots(const glm::FittedGlm& model, const SlotQuery& query);
std::vector<RankedSlot> rank_slots(const forest::ForestModel& model, const SlotQuery& query);

/// The 7 x 24 slots of a month, weekday-major.
std::vector<Slot> all_slots(int month);

struct Heatmap {
  int month = 1;
  double precip = 0.0;
  std::vector<double> cells;  // row-major [weekday][hour]
  double min = 0.0;
  double max = 0.0;
};

Heatmap heatmap(const glm::FittedGlm& model, int month, double precip);

nlohmann::json to_json(const RankedSlot& r);
nlohmann::json to_json(std::span<const RankedSlot> ranked);
nlohmann::json to_json(const glm::CoefficientRow& row);

/// Aligned text table for terminals.
void write_ranking_table(std::ostream& out, std::span<const RankedSlot> ranked);

}  // namespace crashrisk::advisor
