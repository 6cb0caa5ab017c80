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

#include <algorithm>
#include <numeric>
#include <set>

#include "crashrisk/features.hpp"

using namespace crashrisk;
using namespace crashrisk::features;

namespace {

ingest::HourlyObservation obs(int hour, Weekday wd, int month, int precip, int count = 0) {
  ingest::HourlyObservation o;
  o.date = make_date(2016, static_cast<unsigned>(month), 1);
  o.hour = hour;
  o.weekday = wd;
  o.month = month;
  o.precip_indicator = precip;
  o.precipitation_in = precip ? 0.4 : 0.0;
  o.crash_count = count;
  return o;
}

}  // namespace

TEST_CASE("schema widths") {
  FeatureSchema ref;
  CHECK(ref.width() == 42);
  CHECK(full_dummy_schema().width() == 44);
  FeatureSchema no_precip;
  no_precip.include_precip = false;
  CHECK(no_precip.width() == 41);
  const auto names = full_dummy_schema().column_names();
  CHECK(names.front() == "Hour_0");
  CHECK(names[24] == "MO");
  CHECK(names[31] == "JAN");
  CHECK(names.back() == "Precipitation");
  CHECK(ref.column_names().front() == "Intercept");
  CHECK_FALSE(ref.hour_column(0));
  CHECK_FALSE(ref.weekday_column(Weekday::Monday));
  CHECK_FALSE(ref.month_column(1));
}

TEST_CASE("encode examples") {
  FeatureSchema ref;
  auto x = encode(obs(0, Weekday::Monday, 1, 0), ref);
  CHECK(x[0] == 1.0);
  CHECK(std::count(x.begin(), x.end(), 1.0) == 1);

  const auto full = full_dummy_schema();
  x = encode(obs(8, Weekday::Friday, 6, 1), full);
  const auto names = full.column_names();
  std::set<std::string> ones;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] == 1.0) ones.insert(names[j]);
  CHECK(ones == std::set<std::string>{"Hour_8", "FR", "JUN", "Precipitation"});

  FeatureSchema inches = full;
  inches.precip_mode = PrecipMode::inches;
  CHECK(encode(obs(8, Weekday::Friday, 6, 1), inches).back() == 0.4);
}

TEST_CASE("full dummy encoding is a partition and decodes back") {
  const auto full = full_dummy_schema();
  for (int h = 0; h < 24; h += 5) {
    for (int w = 0; w < 7; ++w) {
      for (int m = 1; m <= 12; m += 4) {
        const auto x = encode(obs(h, static_cast<Weekday>(w), m, 0), full);
        CHECK(std::accumulate(x.begin(), x.begin() + 24, 0.0) == 1.0);
        CHECK(std::accumulate(x.begin() + 24, x.begin() + 31, 0.0) == 1.0);
        CHECK(std::accumulate(x.begin() + 31, x.begin() + 43, 0.0) == 1.0);
        CHECK(std::max_element(x.begin(), x.begin() + 24) - x.begin() == h);
        CHECK(std::max_element(x.begin() + 24, x.begin() + 31) - (x.begin() + 24) == w);
        CHECK(std::max_element(x.begin() + 31, x.begin() + 43) - (x.begin() + 31) == m - 1);
      }
    }
  }
}

TEST_CASE("build_design") {
  std::vector<ingest::HourlyObservation> one{obs(3, Weekday::Sunday, 4, 1, 7)};
  const auto d = build_design(one, FeatureSchema{});
  CHECK(d.rows() == 1);
  CHECK(std::vector<double>(d.row(0).begin(), d.row(0).end()) == encode(one[0], FeatureSchema{}));
  CHECK(d.response[0] == 7.0);
  CHECK_THROWS_AS(build_design(std::span<const ingest::HourlyObservation>{}, FeatureSchema{}), Error);
}

TEST_CASE("split") {
  const auto s = split_indices(10, 0.2, 7);
  CHECK(s.test.size() == 2);
  CHECK(s.train.size() == 8);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  const auto again = split_indices(10, 0.2, 7);
  CHECK(again.test == s.test);
  CHECK(split_indices(100, 0.25, 1).test.size() == 25);
  CHECK_THROWS_AS(split_indices(10, 0.0, 1), Error);
  CHECK_THROWS_AS(split_indices(10, 1.0, 1), Error);
  const auto chrono = split_indices(10, 0.3, 1, SplitMethod::chronological);
  CHECK(chrono.test == std::vector<std::size_t>{7, 8, 9});
}
