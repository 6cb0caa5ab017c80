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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crashrisk/calendar.hpp"
#include "crashrisk/ingest.hpp"
#include "crashrisk/numerics.hpp"

namespace crashrisk::features {

enum class Coding {
  reference_cell,  // intercept + all non-reference levels (identifiable)
  full_dummy,      // every level, no intercept (rank deficient)
};

enum class PrecipMode {
  indicator,  // daily 0/1
  inches,     // daily amount
};

/// Column layout of the design matrix. Order is fixed:
///   [Intercept] Hour_0..Hour_23 MO..SU JAN..DEC [Precipitation]
/// with the reference level of each category omitted under reference_cell.
struct FeatureSchema {
  Coding coding = Coding::reference_cell;
  PrecipMode precip_mode = PrecipMode::indicator;
  bool include_precip = true;
  int reference_hour = 0;
  Weekday reference_weekday = Weekday::Monday;
  int reference_month = 1;

  bool has_intercept() const { return coding == Coding::reference_cell; }
  std::size_t width() const;
  std::vector<std::string> column_names() const;

  std::optional<std::size_t> hour_column(int hour) const;
  std::optional<std::size_t> weekday_column(Weekday w) const;
  std::optional<std::size_t> month_column(int month) const;
  std::optional<std::size_t> precip_column() const;
  std::optional<std::size_t> intercept_column() const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

inline FeatureSchema full_dummy_schema() {
  FeatureSchema s;
  s.coding = Coding::full_dummy;
  return s;
}

std::string hour_label(int hour);                 // "Hour_8"
std::string weekday_label(Weekday w);             // "FR"
std::string month_label(int month);               // "JUN"
inline constexpr const char* kPrecipLabel = "Precipitation";
inline constexpr const char* kInterceptLabel = "Intercept";

/// Covariates of one grid cell.
struct CellKey {
  int hour = 0;
  Weekday weekday = Weekday::Monday;
  int month = 1;
  double precip = 0.0;  // indicator or inches, per schema
};

CellKey cell_of(const ingest::HourlyObservation& obs, const FeatureSchema& schema);

void encode(const CellKey& cell, const FeatureSchema& schema, std::span<double> out);
std::vector<double> encode(const ingest::HourlyObservation& obs, const FeatureSchema& schema);

/// Dense design matrix with its response.
struct DesignMatrix {
  FeatureSchema schema;
  numerics::DenseMatrix x;  // rows x columns, row-major
  std::vector<std::string> column_names;
  std::vector<double> response;  // non-negative integers

  std::size_t rows() const { return x.rows; }
  std::size_t cols() const { return x.cols; }
  std::span<const double> row(std::size_t i) const { return x.row(i); }
};

/// Throws Error(usage) on an empty observation list.
DesignMatrix build_design(std::span<const ingest::HourlyObservation> observations, const FeatureSchema& schema);

/// Arbitrary design (tests, synthetic studies). Validates shapes.
DesignMatrix make_design(numerics::DenseMatrix x, std::vector<double> response, std::vector<std::string> names);

DesignMatrix select_rows(const DesignMatrix& m, std::span<const std::size_t> rows);

enum class SplitMethod {
  random,         // seeded shuffle
  chronological,  // last rows (grid order is chronological) become the test set
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// |test| = round(n * test_fraction), clamped to [1, n - 1].
SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed,
                           SplitMethod method = SplitMethod::random);

std::pair<DesignMatrix, DesignMatrix> split(const DesignMatrix& m, double test_fraction, std::uint64_t seed,
                                            SplitMethod method = SplitMethod::random);

/// CSV with header = column names + "response".
void write_design_csv(std::ostream& out, const DesignMatrix& m);

}  // namespace crashrisk::features
