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

#include <string>
#include <vector>

#include "crashrisk/features.hpp"
#include "crashrisk/numerics.hpp"
#include "crashrisk/rng.hpp"

namespace testing_helpers {

// Intercept plus `k` Bernoulli(0.5) dummies.
inline crashrisk::numerics::DenseMatrix dummy_covariates(std::size_t n, std::size_t k, crashrisk::Rng& rng) {
  crashrisk::numerics::DenseMatrix x(n, k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 1; j <= k; ++j) x(i, j) = rng.uniform() < 0.5 ? 1.0 : 0.0;
  }
  return x;
}

inline std::vector<std::string> names(std::size_t p) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < p; ++j) out.push_back("x" + std::to_string(j));
  return out;
}

inline double eta_of(const crashrisk::numerics::DenseMatrix& x, std::size_t i, const std::vector<double>& beta) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.cols; ++j) s += x(i, j) * beta[j];
  return s;
}

inline std::string tmp_dir(const std::string& leaf) { return std::string(CRASHRISK_TEST_TMP) + "/" + leaf; }

}  // namespace testing_helpers

#include "crashrisk/glm.hpp"
#include "crashrisk/synth.hpp"

namespace testing_helpers {

inline std::vector<crashrisk::ingest::HourlyObservation> small_grid(std::uint64_t seed = 1) {
  const crashrisk::DateRange r{crashrisk::make_date(2016, 1, 1), crashrisk::make_date(2016, 12, 31)};
  return crashrisk::synth::generate_grid(r, crashrisk::synth::reference_model(), seed);
}

// Reference-cell model with hand-set coefficients; alpha 0.
inline crashrisk::glm::FittedGlm constructed_model(crashrisk::features::FeatureSchema schema = {}) {
  crashrisk::glm::FittedGlm m;
  m.family = crashrisk::glm::Family::negbin2;
  m.schema = schema;
  m.column_names = schema.column_names();
  m.beta.assign(schema.width(), 0.0);
  m.cov_beta = crashrisk::numerics::DenseMatrix(schema.width(), schema.width());
  m.converged = true;
  return m;
}

}  // namespace testing_helpers
