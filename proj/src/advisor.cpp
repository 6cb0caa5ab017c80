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

#include "crashrisk/advisor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"

namespace crashrisk::advisor {

namespace {

using features::FeatureSchema;
using glm::CoefficientRow;

CoefficientRow reference_row(std::string name) {
  CoefficientRow r;
  r.name = std::move(name);
  r.reference = true;
  return r;
}

void check_model_schema(const glm::FittedGlm& model) {
  const auto names = model.schema.column_names();
  if (model.beta.size() != names.size() || model.column_names != names) {
    throw Error(ErrorKind::usage, "schema_mismatch", "model coefficients do not match its feature schema");
  }
}

double share(long long part, long long total) {
  return total > 0 ? static_cast<double>(part) / static_cast<double>(total) : 0.0;
}

double query_precip(const SlotQuery& q, double fallback) { return q.precip.value_or(fallback); }

std::vector<RankedSlot> order(const SlotQuery& query, std::vector<double> score, std::vector<double> expected,
                              bool log_scale) {
  std::vector<std::size_t> idx(query.slots.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    const Slot& sa = query.slots[a];
    const Slot& sb = query.slots[b];
    if (sa.hour != sb.hour) return sa.hour < sb.hour;
    if (sa.weekday != sb.weekday) return sa.weekday < sb.weekday;
    return a < b;
  });
  std::vector<RankedSlot> out;
  out.reserve(idx.size());
  const double low = score[idx.front()];
  const double low_expected = expected[idx.front()];
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    RankedSlot r;
    r.slot = query.slots[i];
    r.expected_count = expected[i];
    r.rank = static_cast<int>(k + 1);
    if (log_scale) {
      r.relative_risk = std::exp(score[i] - low);
    } else if (low_expected > 0.0) {
      r.relative_risk = expected[i] / low_expected;
    } else {
      r.relative_risk = expected[i] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    out.push_back(r);
  }
  return out;
}

nlohmann::json real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::vector<CoefficientRow> summarize(const glm::FittedGlm& model, std::span<const ingest::HourlyObservation> grid) {
  check_model_schema(model);
  if (grid.empty()) throw Error(ErrorKind::usage, "empty_grid", "summary needs the training grid");

  long long total = 0, wet = 0;
  std::array<long long, kHours> by_hour{};
  std::array<long long, kWeekdays> by_weekday{};
  std::array<long long, kMonths> by_month{};
  for (const auto& o : grid) {
    if (o.hour < 0 || o.hour >= kHours || o.month < 1 || o.month > kMonths) {
      throw Error(ErrorKind::usage, "schema_mismatch", "grid row outside the hour/month levels of the model");
    }
    total += o.crash_count;
    by_hour[static_cast<std::size_t>(o.hour)] += o.crash_count;
    by_weekday[static_cast<std::size_t>(o.weekday)] += o.crash_count;
    by_month[static_cast<std::size_t>(o.month - 1)] += o.crash_count;
    if (o.precip_indicator) wet += o.crash_count;
  }

  const auto wald = glm::wald_inference(model);
  const FeatureSchema& s = model.schema;
  auto fill = [&](std::optional<std::size_t> col, std::string name, long long crashes) {
    CoefficientRow r = col ? CoefficientRow{} : reference_row(name);
    r.name = std::move(name);
    if (col) {
      const double b = model.beta[*col];
      r.coefficient = b;
      r.exp_coef = std::exp(b);
      r.percent_change = glm::percent_change(b);
      r.std_err = wald[*col].std_err;
      r.z = wald[*col].z;
      r.p_value = wald[*col].p_value;
    }
    r.crash_total = crashes;
    r.crash_share = share(crashes, total);
    return r;
  };

  std::vector<CoefficientRow> rows;
  if (auto c = s.intercept_column()) rows.push_back(fill(c, features::kInterceptLabel, total));
  for (int h = 0; h < kHours; ++h) {
    rows.push_back(fill(s.hour_column(h), features::hour_label(h), by_hour[static_cast<std::size_t>(h)]));
  }
  for (int w = 0; w < kWeekdays; ++w) {
    const auto wd = static_cast<Weekday>(w);
    rows.push_back(fill(s.weekday_column(wd), features::weekday_label(wd), by_weekday[static_cast<std::size_t>(w)]));
  }
  for (int m = 1; m <= kMonths; ++m) {
    rows.push_back(fill(s.month_column(m), features::month_label(m), by_month[static_cast<std::size_t>(m - 1)]));
  }
  if (auto c = s.precip_column()) rows.push_back(fill(c, features::kPrecipLabel, wet));
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const CoefficientRow> rows) {
  out << kSummaryHeader << '\n';
  using csv::format_double;
  for (const auto& r : rows) {
    out << csv::escape(r.name) << ',' << format_double(r.coefficient) << ',' << format_double(r.exp_coef) << ','
        << format_double(r.percent_change) << ',' << format_double(r.std_err) << ',' << format_double(r.z) << ','
        << format_double(r.p_value) << ',' << r.crash_total << ',' << format_double(r.crash_share) << '\n';
  }
}

void write_category_csv(std::ostream& out, std::span<const CoefficientRow> rows, Category category) {
  std::vector<std::string> levels;
  switch (category) {
    case Category::hour:
      for (int h = 0; h < kHours; ++h) levels.push_back(features::hour_label(h));
      break;
    case Category::weekday:
      for (int w = 0; w < kWeekdays; ++w) levels.push_back(features::weekday_label(static_cast<Weekday>(w)));
      break;
    case Category::month:
      for (int m = 1; m <= kMonths; ++m) levels.push_back(features::month_label(m));
      break;
  }
  out << "level,coefficient,exp_coef,percent_change,std_err,p_value,reference\n";
  using csv::format_double;
  for (const auto& level : levels) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const CoefficientRow& r) { return r.name == level; });
    if (it == rows.end()) continue;
    out << level << ',' << format_double(it->coefficient) << ',' << format_double(it->exp_coef) << ','
        << format_double(it->percent_change) << ',' << format_double(it->std_err) << ','
        << format_double(it->p_value) << ',' << (it->reference ? "true" : "false") << '\n';
  }
}

void validate_query(const SlotQuery& query, const FeatureSchema& schema) {
  if (query.slots.empty()) throw Error(ErrorKind::usage, "slots", "query needs at least one slot");
  for (std::size_t i = 0; i < query.slots.size(); ++i) {
    const Slot& s = query.slots[i];
    const std::string at = "slots[" + std::to_string(i) + "]";
    if (s.hour < 0 || s.hour >= kHours) throw Error(ErrorKind::usage, "hour", at + ".hour must lie in 0..23");
    if (s.month < 1 || s.month > kMonths) throw Error(ErrorKind::usage, "month", at + ".month must lie in 1..12");
    if (static_cast<int>(s.weekday) >= kWeekdays) throw Error(ErrorKind::usage, "weekday", at + ".weekday invalid");
  }
  if (query.precip) {
    const double p = *query.precip;
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorKind::usage, "precip", "precip must be finite and >= 0");
    if (schema.include_precip && schema.precip_mode == features::PrecipMode::indicator && p != 0.0 && p != 1.0) {
      throw Error(ErrorKind::usage, "precip", "precip must be 0 or 1 for an indicator model");
    }
  }
}

std::vector<RankedSlot> rank_slots(const glm::FittedGlm& model, const SlotQuery& query) {
  check_model_schema(model);
  validate_query(query, model.schema);
  const double precip = query_precip(query, 0.0);
  std::vector<double> x(model.schema.width()), eta, mu;
  for (const Slot& s : query.slots) {
    features::encode({s.hour, s.weekday, s.month, precip}, model.schema, x);
    eta.push_back(glm::linear_predictor(model, x));
    mu.push_back(std::exp(eta.back()));
  }
  return order(query, std::move(eta), std::move(mu), true);
}

std::vector<RankedSlot> rank_slots(const forest::ForestModel& model, const SlotQuery& query) {
  validate_query(query, model.schema);
  const double precip = query_precip(query, model.mean_precip);
  std::vector<double> x(model.schema.width()), pred;
  for (const Slot& s : query.slots) {
    features::encode({s.hour, s.weekday, s.month, precip}, model.schema, x);
    pred.push_back(forest::predict_forest(model, x));
  }
  auto score = pred;
  return order(query, std::move(score), std::move(pred), false);
}

std::vector<Slot> all_slots(int month) {
  std::vector<Slot> out;
  out.reserve(kWeekdays * kHours);
  for (int w = 0; w < kWeekdays; ++w) {
    for (int h = 0; h < kHours; ++h) out.push_back({static_cast<Weekday>(w), h, month});
  }
  return out;
}

Heatmap heatmap(const glm::FittedGlm& model, int month, double precip) {
  check_model_schema(model);
  SlotQuery q{all_slots(month), precip};
  validate_query(q, model.schema);
  Heatmap h;
  h.month = month;
  h.precip = precip;
  std::vector<double> x(model.schema.width());
  for (const Slot& s : q.slots) {
    features::encode({s.hour, s.weekday, s.month, precip}, model.schema, x);
    h.cells.push_back(glm::predict_mean(model, x));
  }
  h.min = *std::min_element(h.cells.begin(), h.cells.end());
  h.max = *std::max_element(h.cells.begin(), h.cells.end());
  return h;
}

nlohmann::json to_json(const RankedSlot& r) {
  return {{"slot",
           {{"weekday", std::string(weekday_code(r.slot.weekday))}, {"hour", r.slot.hour}, {"month", r.slot.month}}},
          {"expected_count", real(r.expected_count)},
          {"rank", r.rank},
          {"relative_risk", real(r.relative_risk)}};
}

nlohmann::json to_json(std::span<const RankedSlot> ranked) {
  auto arr = nlohmann::json::array();
  for (const auto& r : ranked) arr.push_back(to_json(r));
  return arr;
}

nlohmann::json to_json(const CoefficientRow& r) {
  return {{"name", r.name},
          {"coefficient", real(r.coefficient)},
          {"coefficient_text", csv::format_double(r.coefficient)},
          {"exp_coef", real(r.exp_coef)},
          {"percent_change", real(r.percent_change)},
          {"std_err", real(r.std_err)},
          {"z", real(r.z)},
          {"p_value", real(r.p_value)},
          {"crash_total", r.crash_total},
          {"crash_share", real(r.crash_share)},
          {"reference", r.reference}};
}

void write_ranking_table(std::ostream& out, std::span<const RankedSlot> ranked) {
  out << "rank  day  hour  month  expected  relative_risk\n";
  char line[96];
  for (const auto& r : ranked) {
    std::snprintf(line, sizeof line, "%4d  %-3s  %4d  %5s  %8.3f  %13.3f\n", r.rank,
                  std::string(weekday_code(r.slot.weekday)).c_str(), r.slot.hour,
                  std::string(month_code(r.slot.month)).c_str(), r.expected_count, r.relative_risk);
    out << line;
  }
  out << kExposureCaveat << '\n';
}

}  // namespace crashrisk::advisor
