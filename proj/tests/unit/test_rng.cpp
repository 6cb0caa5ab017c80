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
#include <set>
#include <vector>

#include "crashrisk/rng.hpp"

using namespace crashrisk;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments moments(int n, F draw) {
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    s += v;
    ss += v * v;
  }
  const double m = s / n;
  return {m, (ss - n * m * m) / (n - 1)};
}

}  // namespace

TEST_CASE("streams are reproducible and substreams differ") {
  Rng a(1), b(1);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  CHECK(substream_seed(1, "tree", 0) != substream_seed(1, "tree", 1));
  CHECK(substream_seed(1, "tree", 0) != substream_seed(1, "split", 0));
  CHECK(substream_seed(1, "tree", 0) == substream_seed(1, "tree", 0));
  // First outputs of the standard engine are fixed by the standard.
  std::mt19937_64 ref(1);
  Rng c(1);
  CHECK(c.next_u64() == ref());
}

TEST_CASE("uniform and uniform_index") {
  Rng rng(2);
  const auto m = moments(200000, [&] { return rng.uniform(); });
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(m.var == doctest::Approx(1.0 / 12).epsilon(0.02));
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[rng.uniform_index(7)];
  for (int h : hits) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("continuous distributions match their moments") {
  Rng rng(3);
  auto n = moments(200000, [&] { return rng.normal(); });
  CHECK(std::abs(n.mean) < 0.01);
  CHECK(n.var == doctest::Approx(1.0).epsilon(0.02));
  for (double shape : {0.3, 1.0, 2.5, 200.0}) {
    auto g = moments(200000, [&] { return rng.gamma(shape, 2.0); });
    CHECK(g.mean == doctest::Approx(2.0 * shape).epsilon(0.02));
    CHECK(g.var == doctest::Approx(4.0 * shape).epsilon(0.05));
  }
}

TEST_CASE("count distributions match their moments") {
  Rng rng(4);
  for (double mu : {0.2, 3.0, 29.0, 31.0, 500.0}) {
    auto p = moments(200000, [&] { return static_cast<double>(rng.poisson(mu)); });
    CHECK(p.mean == doctest::Approx(mu).epsilon(0.02));
    CHECK(p.var == doctest::Approx(mu).epsilon(0.04));
  }
  for (double alpha : {0.1, 0.8}) {
    auto nb = moments(200000, [&] { return static_cast<double>(rng.negbin2(5.0, alpha)); });
    CHECK(nb.mean == doctest::Approx(5.0).epsilon(0.02));
    CHECK(nb.var == doctest::Approx(5.0 + alpha * 25.0).epsilon(0.05));
  }
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(6);
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  rng.shuffle(std::span<int>(v));
  CHECK(std::set<int>(v.begin(), v.end()).size() == 100);
  bool moved = false;
  for (int i = 0; i < 100; ++i) moved |= v[i] != i;
  CHECK(moved);
}
