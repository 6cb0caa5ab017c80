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

#include "crashrisk/features.hpp"

#include <cmath>
#include <numeric>

#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"
#include "crashrisk/rng.hpp"

namespace crashrisk::features {

namespace {

// Offsets of each block within the column layout.
struct Layout {
  std::size_t intercept = 0;  // count 0 or 1
  std::size_t hours = 0;
  std::size_t weekdays = 0;
  std::size_t months = 0;
  std::size_t precip = 0;
  std::size_t width = 0;
};

Layout layout_of(const FeatureSchema& s) {
  const std::size_t drop = s.coding == Coding::reference_cell ? 1 : 0;
  Layout l;
  std::size_t at = s.has_intercept() ? 1 : 0;
  l.hours = at;
  at += kHours - drop;
  l.weekdays = at;
  at += kWeekdays - drop;
  l.months = at;
  at += kMonths - drop;
  l.precip = at;
  if (s.include_precip) ++at;
  l.width = at;
  return l;
}

// Index of `level` among the kept levels of a category (skipping the reference).
std::optional<std::size_t> level_slot(int level, int reference, bool drop_reference) {
  if (!drop_reference) return static_cast<std::size_t>(level);
  if (level == reference) return std::nullopt;
  return static_cast<std::size_t>(level < reference ? level : level - 1);
}

}  // namespace

std::size_t FeatureSchema::width() const { return layout_of(*this).width; }

std::optional<std::size_t> FeatureSchema::hour_column(int hour) const {
  if (hour < 0 || hour >= kHours) return std::nullopt;
  const auto slot = level_slot(hour, reference_hour, coding == Coding::reference_cell);
  if (!slot) return std::nullopt;
  return layout_of(*this).hours + *slot;
}

std::optional<std::size_t> FeatureSchema::weekday_column(Weekday w) const {
  const auto slot =
      level_slot(static_cast<int>(w), static_cast<int>(reference_weekday), coding == Coding::reference_cell);
  if (!slot) return std::nullopt;
  return layout_of(*this).weekdays + *slot;
}

std::optional<std::size_t> FeatureSchema::month_column(int month) const {
  if (month < 1 || month > kMonths) return std::nullopt;
  const auto slot = level_slot(month - 1, reference_month - 1, coding == Coding::reference_cell);
  if (!slot) return std::nullopt;
  return layout_of(*this).months + *slot;
}

std::optional<std::size_t> FeatureSchema::precip_column() const {
  if (!include_precip) return std::nullopt;
  return layout_of(*this).precip;
}

std::optional<std::size_t> FeatureSchema::intercept_column() const {
  if (!has_intercept()) return std::nullopt;
  return 0;
}

std::vector<std::string> FeatureSchema::column_names() const {
  std::vector<std::string> names(width());
  if (auto c = intercept_column()) names[*c] = kInterceptLabel;
  for (int h = 0; h < kHours; ++h) {
    if (auto c = hour_column(h)) names[*c] = hour_label(h);
  }
  for (int w = 0; w < kWeekdays; ++w) {
    if (auto c = weekday_column(static_cast<Weekday>(w))) names[*c] = weekday_label(static_cast<Weekday>(w));
  }
  for (int m = 1; m <= kMonths; ++m) {
    if (auto c = month_column(m)) names[*c] = month_label(m);
  }
  if (auto c = precip_column()) names[*c] = kPrecipLabel;
  return names;
}

std::string hour_label(int hour) { return "Hour_" + std::to_string(hour); }
std::string weekday_label(Weekday w) { return std::string(weekday_code(w)); }
std::string month_label(int month) { return std::string(month_code(month)); }

CellKey cell_of(const ingest::HourlyObservation& obs, const FeatureSchema& schema) {
  return CellKey{obs.hour, obs.weekday, obs.month,
                 schema.precip_mode == PrecipMode::inches ? obs.precipitation_in
                                                          : static_cast<double>(obs.precip_indicator)};
}

void encode(const CellKey& cell, const FeatureSchema& schema, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (auto c = schema.intercept_column()) out[*c] = 1.0;
  if (auto c = schema.hour_column(cell.hour)) out[*c] = 1.0;
  if (auto c = schema.weekday_column(cell.weekday)) out[*c] = 1.0;
  if (auto c = schema.month_column(cell.month)) out[*c] = 1.0;
  if (auto c = schema.precip_column()) out[*c] = cell.precip;
}

std::vector<double> encode(const ingest::HourlyObservation& obs, const FeatureSchema& schema) {
  std::vector<double> out(schema.width());
  encode(cell_of(obs, schema), schema, out);
  return out;
}

DesignMatrix build_design(std::span<const ingest::HourlyObservation> observations, const FeatureSchema& schema) {
  if (observations.empty()) {
    throw Error(ErrorKind::usage, "empty_design", "cannot build a design matrix from zero observations");
  }
  DesignMatrix m;
  m.schema = schema;
  m.column_names = schema.column_names();
  m.x = numerics::DenseMatrix(observations.size(), schema.width());
  m.response.resize(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    encode(cell_of(observations[i], schema), schema, m.x.row(i));
    m.response[i] = static_cast<double>(observations[i].crash_count);
  }
  return m;
}

DesignMatrix make_design(numerics::DenseMatrix x, std::vector<double> response, std::vector<std::string> names) {
  if (x.rows == 0 || x.cols == 0) throw Error(ErrorKind::usage, "empty_design", "design matrix has no rows or columns");
  if (response.size() != x.rows) throw Error(ErrorKind::usage, "shape", "response length does not match row count");
  if (names.empty()) {
    for (std::size_t j = 0; j < x.cols; ++j) names.push_back("x" + std::to_string(j));
  }
  if (names.size() != x.cols) throw Error(ErrorKind::usage, "shape", "column name count does not match column count");
  for (double y : response) {
    if (!(y >= 0.0) || std::floor(y) != y) {
      throw Error(ErrorKind::usage, "bad_response", "response values must be non-negative integers");
    }
  }
  DesignMatrix m;
  m.x = std::move(x);
  m.response = std::move(response);
  m.column_names = std::move(names);
  return m;
}

DesignMatrix select_rows(const DesignMatrix& m, std::span<const std::size_t> rows) {
  DesignMatrix out;
  out.schema = m.schema;
  out.column_names = m.column_names;
  out.x = numerics::DenseMatrix(rows.size(), m.cols());
  out.response.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.x.row(i).begin());
    out.response[i] = m.response[rows[i]];
  }
  return out;
}

SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed, SplitMethod method) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::usage, "bad_fraction", "test fraction must lie strictly between 0 and 1");
  }
  if (n < 2) throw Error(ErrorKind::usage, "too_few_rows", "splitting needs at least 2 rows");
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitIndices out;
  if (method == SplitMethod::random) {
    Rng rng = substream(seed, "split");
    rng.shuffle(std::span<std::size_t>(order));
    out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(out.test.begin(), out.test.end());
    std::sort(out.train.begin(), out.train.end());
  } else {
    out.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
    out.test.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
  }
  return out;
}

std::pair<DesignMatrix, DesignMatrix> split(const DesignMatrix& m, double test_fraction, std::uint64_t seed,
                                            SplitMethod method) {
  const auto idx = split_indices(m.rows(), test_fraction, seed, method);
  return {select_rows(m, idx.train), select_rows(m, idx.test)};
}

void write_design_csv(std::ostream& out, const DesignMatrix& m) {
  std::vector<std::string> header = m.column_names;
  header.push_back("response");
  csv::write_row(out, header);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << csv::format_double(r[j]) << ',';
    out << csv::format_double(m.response[i]) << '\n';
  }
}

}  // namespace crashrisk::features
