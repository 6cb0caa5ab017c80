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

#include "crashrisk/artifact.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"
#include "crashrisk/hash.hpp"

namespace crashrisk::artifact {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(std::string code, const std::string& message) {
  throw Error(ErrorKind::artifact, std::move(code), message);
}

// Finite reals are JSON numbers (the writer emits round-trip digits);
// non-finite ones are strings.
json real(double v) {
  if (std::isfinite(v)) return v;
  return csv::format_double(v);
}

double real_of(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto v = csv::parse_double(j.get<std::string>())) return *v;
  }
  fail("artifact_format", "expected a real number");
}

json reals(std::span<const double> v) {
  auto a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

std::vector<double> reals_of(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(real_of(x));
  return v;
}

json schema_json(const features::FeatureSchema& s) {
  return {{"coding", s.coding == features::Coding::reference_cell ? "reference" : "full-dummy"},
          {"precip_mode", s.precip_mode == features::PrecipMode::indicator ? "indicator" : "inches"},
          {"include_precip", s.include_precip},
          {"reference_hour", s.reference_hour},
          {"reference_weekday", static_cast<int>(s.reference_weekday)},
          {"reference_month", s.reference_month}};
}

features::FeatureSchema schema_of(const json& j) {
  features::FeatureSchema s;
  const auto coding = j.at("coding").get<std::string>();
  if (coding == "reference") {
    s.coding = features::Coding::reference_cell;
  } else if (coding == "full-dummy") {
    s.coding = features::Coding::full_dummy;
  } else {
    fail("artifact_format", "unknown coding " + coding);
  }
  const auto mode = j.at("precip_mode").get<std::string>();
  s.precip_mode = mode == "inches" ? features::PrecipMode::inches : features::PrecipMode::indicator;
  s.include_precip = j.at("include_precip").get<bool>();
  s.reference_hour = j.at("reference_hour").get<int>();
  s.reference_weekday = static_cast<Weekday>(j.at("reference_weekday").get<int>());
  s.reference_month = j.at("reference_month").get<int>();
  return s;
}

json dispersion_json(const glm::DispersionReport& d) {
  return {{"pearson_ratio", real(d.pearson_ratio)}, {"ct_coefficient", real(d.ct_coefficient)},
          {"ct_t", real(d.ct_t)},                   {"ct_p_value", real(d.ct_p_value)},
          {"overdispersed", d.overdispersed}};
}

glm::DispersionReport dispersion_of(const json& j) {
  glm::DispersionReport d;
  d.pearson_ratio = real_of(j.at("pearson_ratio"));
  d.ct_coefficient = real_of(j.at("ct_coefficient"));
  d.ct_t = real_of(j.at("ct_t"));
  d.ct_p_value = real_of(j.at("ct_p_value"));
  d.overdispersed = j.at("overdispersed").get<bool>();
  return d;
}

json row_json(const glm::CoefficientRow& r) {
  return {{"name", r.name},
          {"coefficient", real(r.coefficient)},
          {"exp_coef", real(r.exp_coef)},
          {"percent_change", real(r.percent_change)},
          {"std_err", real(r.std_err)},
          {"z", real(r.z)},
          {"p_value", real(r.p_value)},
          {"crash_total", r.crash_total},
          {"crash_share", real(r.crash_share)},
          {"reference", r.reference}};
}

glm::CoefficientRow row_of(const json& j) {
  glm::CoefficientRow r;
  r.name = j.at("name").get<std::string>();
  r.coefficient = real_of(j.at("coefficient"));
  r.exp_coef = real_of(j.at("exp_coef"));
  r.percent_change = real_of(j.at("percent_change"));
  r.std_err = real_of(j.at("std_err"));
  r.z = real_of(j.at("z"));
  r.p_value = real_of(j.at("p_value"));
  r.crash_total = j.at("crash_total").get<long long>();
  r.crash_share = real_of(j.at("crash_share"));
  r.reference = j.at("reference").get<bool>();
  return r;
}

json options_json(const glm::FitOptions& o) {
  json j = {{"max_iterations", o.max_iterations},
            {"beta_tolerance", real(o.beta_tolerance)},
            {"loglik_rel_tolerance", real(o.loglik_rel_tolerance)},
            {"nb_loglik_tolerance", real(o.nb_loglik_tolerance)},
            {"max_outer_iterations", o.max_outer_iterations},
            {"alpha_min", real(o.alpha_min)},
            {"alpha_max", real(o.alpha_max)},
            {"score_tolerance", real(o.score_tolerance)},
            {"solve_mode", nullptr}};
  if (o.solve_mode) j["solve_mode"] = *o.solve_mode == numerics::SolveMode::strict ? "strict" : "min_norm";
  return j;
}

glm::FitOptions options_of(const json& j) {
  glm::FitOptions o;
  o.max_iterations = j.at("max_iterations").get<int>();
  o.beta_tolerance = real_of(j.at("beta_tolerance"));
  o.loglik_rel_tolerance = real_of(j.at("loglik_rel_tolerance"));
  o.nb_loglik_tolerance = real_of(j.at("nb_loglik_tolerance"));
  o.max_outer_iterations = j.at("max_outer_iterations").get<int>();
  o.alpha_min = real_of(j.at("alpha_min"));
  o.alpha_max = real_of(j.at("alpha_max"));
  o.score_tolerance = real_of(j.at("score_tolerance"));
  if (!j.at("solve_mode").is_null()) {
    o.solve_mode =
        j.at("solve_mode").get<std::string>() == "strict" ? numerics::SolveMode::strict : numerics::SolveMode::min_norm;
  }
  return o;
}

std::string wrap(const char* format, const json& payload) {
  const std::string body = payload.dump();
  json env = {{"format", format},
              {"version", std::to_string(kMajorVersion) + "." + std::to_string(kMinorVersion)},
              {"checksum", sha256_hex(body)},
              {"payload", payload}};
  return env.dump() + "\n";
}

struct Envelope {
  std::string format;
  std::string checksum;
  json payload;
};

Envelope unwrap(std::string_view text) {
  json env;
  try {
    env = json::parse(text.begin(), text.end());
  } catch (const json::exception&) {
    fail("artifact_checksum", "artifact is truncated or corrupt");
  }
  if (!env.is_object() || !env.contains("version") || !env.contains("payload") || !env.contains("checksum") ||
      !env.contains("format")) {
    fail("artifact_checksum", "artifact envelope is incomplete");
  }
  Envelope e;
  try {
    const auto version = env.at("version").get<std::string>();
    const auto dot = version.find('.');
    const auto major = csv::parse_int(version.substr(0, dot));
    if (!major || dot == std::string::npos) fail("artifact_version", "malformed artifact version " + version);
    if (*major != kMajorVersion) {
      fail("artifact_version", "artifact version " + version + " is not readable by this build (major " +
                                   std::to_string(kMajorVersion) + ")");
    }
    e.format = env.at("format").get<std::string>();
    e.checksum = env.at("checksum").get<std::string>();
  } catch (const json::exception&) {
    fail("artifact_format", "artifact envelope fields have the wrong type");
  }
  e.payload = std::move(env.at("payload"));
  if (sha256_hex(e.payload.dump()) != e.checksum) fail("artifact_checksum", "artifact checksum mismatch");
  return e;
}

Envelope unwrap_as(std::string_view text, const char* format) {
  auto e = unwrap(text);
  if (e.format != format) fail("artifact_format", "expected a " + std::string(format) + " artifact, got " + e.format);
  return e;
}

template <class F>
auto decode(F&& f) {
  try {
    return f();
  } catch (const json::exception& ex) {
    fail("artifact_format", std::string("artifact payload is malformed: ") + ex.what());
  }
}

}  // namespace

std::string save_glm(const GlmBundle& b) {
  const auto& m = b.model;
  const auto& d = m.diagnostics;
  json payload = {
      {"family", glm::family_name(m.family)},
      {"schema", schema_json(m.schema)},
      {"column_names", m.column_names},
      {"beta", reals(m.beta)},
      {"alpha", real(m.alpha)},
      {"cov_beta", {{"rows", m.cov_beta.rows}, {"cols", m.cov_beta.cols}, {"values", reals(m.cov_beta.values)}}},
      {"log_likelihood", real(m.log_likelihood)},
      {"n_obs", m.n_obs},
      {"converged", m.converged},
      {"iterations", m.iterations},
      {"diagnostics",
       {{"identifiable", d.identifiable},
        {"rank", d.rank},
        {"jitter_applied", real(d.jitter_applied)},
        {"alpha_at_lower_bound", d.alpha_at_lower_bound},
        {"max_abs_score", real(d.max_abs_score)},
        {"warnings", d.warnings}}},
      {"options", options_json(m.options)},
      {"data_fingerprint", m.data_fingerprint},
      {"dispersion", b.dispersion ? dispersion_json(*b.dispersion) : json(nullptr)},
      {"summary", json::array()}};
  for (const auto& r : b.summary) payload["summary"].push_back(row_json(r));
  return wrap(kGlmFormat, payload);
}

GlmBundle load_glm(std::string_view text) {
  const auto env = unwrap_as(text, kGlmFormat);
  return decode([&] {
    const json& p = env.payload;
    GlmBundle b;
    auto& m = b.model;
    const auto family = glm::parse_family(p.at("family").get<std::string>());
    if (!family) fail("artifact_format", "unknown family");
    m.family = *family;
    m.schema = schema_of(p.at("schema"));
    m.column_names = p.at("column_names").get<std::vector<std::string>>();
    m.beta = reals_of(p.at("beta"));
    m.alpha = real_of(p.at("alpha"));
    const auto& cov = p.at("cov_beta");
    m.cov_beta.rows = cov.at("rows").get<std::size_t>();
    m.cov_beta.cols = cov.at("cols").get<std::size_t>();
    m.cov_beta.values = reals_of(cov.at("values"));
    m.log_likelihood = real_of(p.at("log_likelihood"));
    m.n_obs = p.at("n_obs").get<std::size_t>();
    m.converged = p.at("converged").get<bool>();
    m.iterations = p.at("iterations").get<int>();
    const auto& d = p.at("diagnostics");
    m.diagnostics.identifiable = d.at("identifiable").get<bool>();
    m.diagnostics.rank = d.at("rank").get<std::size_t>();
    m.diagnostics.jitter_applied = real_of(d.at("jitter_applied"));
    m.diagnostics.alpha_at_lower_bound = d.at("alpha_at_lower_bound").get<bool>();
    m.diagnostics.max_abs_score = real_of(d.at("max_abs_score"));
    m.diagnostics.warnings = d.at("warnings").get<std::vector<std::string>>();
    m.options = options_of(p.at("options"));
    m.data_fingerprint = p.at("data_fingerprint").get<std::string>();
    if (!p.at("dispersion").is_null()) b.dispersion = dispersion_of(p.at("dispersion"));
    for (const auto& r : p.at("summary")) b.summary.push_back(row_of(r));
    if (m.beta.size() != m.column_names.size() || m.beta.size() != m.schema.width() ||
        m.cov_beta.values.size() != m.cov_beta.rows * m.cov_beta.cols) {
      fail("artifact_format", "artifact dimensions are inconsistent");
    }
    return b;
  });
}

std::string save_forest(const forest::ForestModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         value = json::array(), n = json::array();
    for (const auto& node : t.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(real(node.threshold));
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(real(node.value));
      n.push_back(node.n);
    }
    trees.push_back({{"feature", std::move(feature)},
                     {"threshold", std::move(threshold)},
                     {"left", std::move(left)},
                     {"right", std::move(right)},
                     {"value", std::move(value)},
                     {"n", std::move(n)}});
  }
  const auto& p = m.params;
  json params = {{"n_estimators", p.n_estimators},
                 {"max_depth", p.max_depth ? json(*p.max_depth) : json(nullptr)},
                 {"min_samples_leaf", p.min_samples_leaf},
                 {"mtry", p.mtry ? json(*p.mtry) : json(nullptr)},
                 {"bootstrap", p.bootstrap}};
  json payload = {{"params", params},
                  {"seed", m.seed},
                  {"feature_names", m.feature_names},
                  {"schema", schema_json(m.schema)},
                  {"importance", reals(m.importance)},
                  {"mean_precip", real(m.mean_precip)},
                  {"n_train", m.n_train},
                  {"trees", std::move(trees)}};
  return wrap(kForestFormat, payload);
}

forest::ForestModel load_forest(std::string_view text) {
  const auto env = unwrap_as(text, kForestFormat);
  return decode([&] {
    const json& p = env.payload;
    forest::ForestModel m;
    const auto& pj = p.at("params");
    m.params.n_estimators = pj.at("n_estimators").get<std::size_t>();
    if (!pj.at("max_depth").is_null()) m.params.max_depth = pj.at("max_depth").get<std::size_t>();
    m.params.min_samples_leaf = pj.at("min_samples_leaf").get<std::size_t>();
    if (!pj.at("mtry").is_null()) m.params.mtry = pj.at("mtry").get<std::size_t>();
    m.params.bootstrap = pj.at("bootstrap").get<bool>();
    m.seed = p.at("seed").get<std::uint64_t>();
    m.feature_names = p.at("feature_names").get<std::vector<std::string>>();
    m.schema = schema_of(p.at("schema"));
    m.importance = reals_of(p.at("importance"));
    m.mean_precip = real_of(p.at("mean_precip"));
    m.n_train = p.at("n_train").get<std::size_t>();
    const auto width = static_cast<std::int32_t>(m.feature_names.size());
    for (const auto& tj : p.at("trees")) {
      forest::Tree t;
      const auto& feature = tj.at("feature");
      const std::size_t count = feature.size();
      const auto& threshold = tj.at("threshold");
      const auto& left = tj.at("left");
      const auto& right = tj.at("right");
      const auto& value = tj.at("value");
      const auto& n = tj.at("n");
      if (count == 0 || threshold.size() != count || left.size() != count || right.size() != count ||
          value.size() != count || n.size() != count) {
        fail("artifact_format", "tree arrays have inconsistent lengths");
      }
      t.nodes.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        auto& node = t.nodes[i];
        node.feature = feature[i].get<std::int32_t>();
        node.threshold = real_of(threshold[i]);
        node.left = left[i].get<std::int32_t>();
        node.right = right[i].get<std::int32_t>();
        node.value = real_of(value[i]);
        node.n = n[i].get<std::uint32_t>();
        const auto limit = static_cast<std::int32_t>(count);
        if (node.feature >= width ||
            (node.feature >= 0 && (node.left <= static_cast<std::int32_t>(i) || node.left >= limit ||
                                   node.right <= static_cast<std::int32_t>(i) || node.right >= limit))) {
          fail("artifact_format", "tree node references are out of range");
        }
      }
      m.trees.push_back(std::move(t));
    }
    if (m.trees.empty() || m.schema.width() != m.feature_names.size() ||
        m.importance.size() != m.feature_names.size()) {
      fail("artifact_format", "forest artifact dimensions are inconsistent");
    }
    return m;
  });
}

Kind kind_of(std::string_view text) {
  const auto e = unwrap(text);
  if (e.format == kGlmFormat) return Kind::glm;
  if (e.format == kForestFormat) return Kind::forest;
  fail("artifact_format", "unknown artifact format " + e.format);
}

std::string fingerprint(std::string_view text) { return unwrap(text).checksum; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::data, "io", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::data, "io", "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::data, "io", "failed writing " + path);
}

}  // namespace crashrisk::artifact
