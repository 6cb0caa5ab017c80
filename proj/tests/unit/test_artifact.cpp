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

#include "crashrisk/advisor.hpp"
#include "crashrisk/artifact.hpp"
#include "helpers.hpp"

using namespace crashrisk;

namespace {

artifact::GlmBundle fitted_bundle() {
  const auto grid = testing_helpers::small_grid(5);
  const auto d = features::build_design(grid, features::FeatureSchema{});
  artifact::GlmBundle b{glm::fit_negbin(d), glm::dispersion_check(glm::fit_poisson(d), d), {}};
  b.summary = advisor::summarize(b.model, grid);
  return b;
}

std::vector<std::vector<double>> probes(std::size_t p) {
  Rng rng(77);
  std::vector<std::vector<double>> out(100, std::vector<double>(p));
  for (auto& v : out)
    for (auto& x : v) x = rng.uniform() < 0.5 ? 0.0 : rng.uniform() * 2;
  return out;
}

Error load_error(const std::string& text) {
  try {
    artifact::load_glm(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an artifact error");
  return Error(ErrorKind::usage, "", "");
}

}  // namespace

TEST_CASE("GLM artifacts round-trip exactly") {
  const auto b = fitted_bundle();
  const auto text = artifact::save_glm(b);
  const auto back = artifact::load_glm(text);
  CHECK(back.model == b.model);
  CHECK(back.dispersion == b.dispersion);
  CHECK(back.summary == b.summary);
  for (const auto& x : probes(b.model.beta.size())) {
    CHECK(glm::predict_mean(back.model, x) == glm::predict_mean(b.model, x));
  }
  CHECK(artifact::save_glm(back) == text);
  CHECK(artifact::kind_of(text) == artifact::Kind::glm);
  CHECK(artifact::fingerprint(text).size() == 64);
}

TEST_CASE("forest artifacts round-trip exactly") {
  const auto grid = testing_helpers::small_grid(6);
  const auto d = features::build_design(grid, features::full_dummy_schema());
  forest::ForestParams p;
  p.n_estimators = 3;
  p.mtry = 20;
  const auto f = forest::fit_forest(d, p, 4);
  const auto text = artifact::save_forest(f);
  const auto back = artifact::load_forest(text);
  REQUIRE(back.trees.size() == f.trees.size());
  for (std::size_t t = 0; t < f.trees.size(); ++t) CHECK(back.trees[t].nodes == f.trees[t].nodes);
  CHECK(back.params == f.params);
  CHECK(back.importance == f.importance);
  CHECK(back.schema == f.schema);
  for (const auto& x : probes(d.cols())) CHECK(forest::predict_forest(back, x) == forest::predict_forest(f, x));
  CHECK(artifact::save_forest(back) == text);
  CHECK_THROWS_AS(artifact::load_glm(text), Error);
}

TEST_CASE("corrupt and foreign artifacts are rejected") {
  const auto text = artifact::save_glm(fitted_bundle());
  auto e = load_error(text.substr(0, text.size() / 2));
  CHECK(e.kind() == ErrorKind::artifact);
  CHECK(e.code() == "artifact_checksum");

  std::string tampered = text;
  const auto pos = tampered.find("\"n_obs\":");
  tampered.replace(pos, 9, "\"n_obs\":9");
  CHECK(load_error(tampered).code() == "artifact_checksum");

  std::string newer = text;
  newer.replace(newer.find("\"version\":\"1.0\""), 15, "\"version\":\"2.0\"");
  CHECK(load_error(newer).code() == "artifact_version");

  std::string minor = text;
  minor.replace(minor.find("\"version\":\"1.0\""), 15, "\"version\":\"1.7\"");
  CHECK_NOTHROW(artifact::load_glm(minor));
}
