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

#include <doctest.h>

#include <cmath>

#include "crashrisk/advisor.hpp"
#include "crashrisk/service.hpp"
#include "helpers.hpp"

using namespace crashrisk;
using namespace crashrisk::service;
using json = nlohmann::json;

namespace {

ServiceState state_with_model() {
  const auto grid = testing_helpers::small_grid(8);
  const auto d = features::build_design(grid, features::FeatureSchema{});
  artifact::GlmBundle b{glm::fit_negbin(d), glm::dispersion_check(glm::fit_poisson(d), d), {}};
  b.summary = advisor::summarize(b.model, grid);
  ServiceState s;
  s.glm = b;
  s.fingerprint = artifact::fingerprint(artifact::save_glm(b));
  return s;
}

const ServiceState& shared_state() {
  static const ServiceState s = state_with_model();
  return s;
}

}  // namespace

TEST_CASE("model endpoint") {
  const auto r = handle_model(shared_state());
  REQUIRE(r.status == 200);
  const auto doc = json::parse(r.body);
  CHECK(doc["family"] == "negbin2");
  CHECK(doc["rows"].size() == 42);
  CHECK(doc["reference_rows"].size() == 3);
  for (const auto& row : doc["rows"]) {
    CHECK(std::abs(row["percent_change"].get<double>() - 100.0 * std::expm1(row["coefficient"].get<double>())) <= 1e-6);
    CHECK(row["coefficient_text"].is_string());
  }
  CHECK(doc["dispersion"]["overdispersed"].is_boolean());

  const auto missing = handle_model(ServiceState{});
  CHECK(missing.status == 404);
  CHECK(json::parse(missing.body)["code"] == "not_found");
}

TEST_CASE("rank endpoint") {
  const auto& s = shared_state();
  auto r = handle_rank(s, R"({"slots":[{"weekday":"MO","hour":8,"month":6}],"precip":0})");
  REQUIRE(r.status == 200);
  auto doc = json::parse(r.body);
  REQUIRE(doc.size() == 1);
  CHECK(doc[0]["rank"] == 1);
  CHECK(doc[0]["relative_risk"] == 1.0);

  const std::string body = R"({"slots":[{"weekday":"FR","hour":2,"month":6},{"weekday":2,"hour":14,"month":6}],"precip":1})";
  CHECK(handle_rank(s, body).body == handle_rank(s, body).body);
  const auto direct = advisor::rank_slots(
      s.glm->model, {{{Weekday::Friday, 2, 6}, {Weekday::Wednesday, 14, 6}}, 1.0});
  CHECK(handle_rank(s, body).body == advisor::to_json(direct).dump());

  r = handle_rank(s, R"({"slots":[{"weekday":"MO","hour":24,"month":6}]})");
  CHECK(r.status == 400);
  doc = json::parse(r.body);
  CHECK(doc["code"] == "bad_request");
  CHECK(doc["detail"]["field"].get<std::string>().find("hour") != std::string::npos);

  CHECK(json::parse(handle_rank(s, R"({"slots":[]})").body)["detail"]["field"] == "slots");
  CHECK(handle_rank(s, R"({"slots":[{"weekday":"MO","hour":1,"month":13}]})").status == 400);
  CHECK(handle_rank(s, "not json").status == 400);
  CHECK(handle_rank(s, R"({"slots":[{"weekday":"XX","hour":1,"month":1}]})").status == 400);
  CHECK(handle_rank(ServiceState{}, R"({"slots":[]})").status == 404);
}

TEST_CASE("heatmap endpoint") {
  const auto& s = shared_state();
  const auto dry = json::parse(handle_heatmap(s, "6", "0").body);
  const auto wet = json::parse(handle_heatmap(s, "6", "1").body);
  REQUIRE(dry["cells"].size() == 7);
  const double precip_coef = s.glm->model.beta[*s.glm->model.schema.precip_column()];
  std::size_t cells = 0;
  for (std::size_t w = 0; w < 7; ++w) {
    REQUIRE(dry["cells"][w].size() == 24);
    for (std::size_t h = 0; h < 24; ++h, ++cells) {
      const double a = dry["cells"][w][h], b = wet["cells"][w][h];
      CHECK(a > 0.0);
      CHECK(b / a == doctest::Approx(std::exp(precip_coef)).epsilon(1e-12));
    }
  }
  CHECK(cells == 168);
  CHECK(handle_heatmap(s, "13", "0").status == 400);
  CHECK(handle_heatmap(s, std::nullopt, "0").status == 400);
  CHECK(handle_heatmap(s, "6", "abc").status == 400);
  CHECK(handle_heatmap(s, "6", "0.5").status == 400);
  CHECK(handle_heatmap(ServiceState{}, "6", "0").status == 404);
}

TEST_CASE("bind parsing") {
  auto e = parse_bind("0.0.0.0:9000");
  CHECK(e.host == "0.0.0.0");
  CHECK(e.port == 9000);
  e = parse_bind(":81");
  CHECK(e.host == "127.0.0.1");
  CHECK_THROWS_AS(parse_bind("nohost"), Error);
  CHECK_THROWS_AS(parse_bind("h:70000"), Error);
}
