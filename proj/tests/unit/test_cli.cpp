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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crashrisk/artifact.hpp"
#include "crashrisk/cli.hpp"
#include "crashrisk/synth.hpp"
#include "helpers.hpp"

using namespace crashrisk;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "crashrisk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const DateRange kRange{make_date(2016, 1, 1), make_date(2016, 12, 31)};

// Synthetic exports covering kRange; `drop` removes one weather date.
fs::path inputs(const std::string& name, std::optional<Date> drop = std::nullopt) {
  const fs::path dir = testing_helpers::tmp_dir(name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto weather = synth::generate_weather(kRange, 0.33, 3);
  const auto grid = synth::generate_grid(kRange, weather, synth::reference_model(), 3);
  if (drop) std::erase_if(weather, [&](const auto& d) { return d.date == *drop; });
  std::ofstream c(dir / "crashes.csv");
  synth::write_crash_csv(c, synth::crash_events(grid, 3));
  std::ofstream w(dir / "weather.csv");
  synth::write_weather_csv(w, weather);
  return dir;
}

std::string slurp(const fs::path& p) { return artifact::read_file(p.string()); }

std::vector<std::string> common(const fs::path& in) {
  return {"--crash", (in / "crashes.csv").string(), "--weather", (in / "weather.csv").string(),
          "--from",  "2016-01-01",                  "--to",      "2016-12-31"};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("ingest writes a deterministic grid and echoes config") {
  const auto in = inputs("cli_ingest");
  const auto out1 = in / "out1", out2 = in / "out2";
  auto r = run(cat({"ingest"}, cat(common(in), {"--out", out1.string()})));
  REQUIRE(r.code == 0);
  r = run(cat({"ingest"}, cat(common(in), {"--out", out2.string()})));
  REQUIRE(r.code == 0);
  CHECK(slurp(out1 / "grid.csv") == slurp(out2 / "grid.csv"));
  const auto report = json::parse(slurp(out1 / "ingest_report.json"));
  CHECK(report["grid_rows"] == 366 * 24);
  const auto config = json::parse(slurp(out1 / "config.json"));
  CHECK(config["config"]["seed"] == 20160101);
  CHECK(config["inputs"]["crash"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("missing weather date exits with a data error listing it") {
  const auto in = inputs("cli_gap", make_date(2016, 3, 3));
  const auto r = run(cat({"ingest"}, cat(common(in), {"--out", (in / "out").string()})));
  CHECK(r.code == 3);
  const auto err = json::parse(r.err);
  CHECK(err["error"]["code"] == "weather_gap");
  CHECK(err["error"]["detail"]["missing_dates"][0] == "2016-03-03");
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"fit", "--coding", "sideways"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"rank", "--month", "13"}).code == 2);
  CHECK(run({"fit"}).code == 2);
  CHECK(run({"fit", "--split-frac", "1.5"}).code == 2);
}

TEST_CASE("fit, rank and forest") {
  const auto in = inputs("cli_fit");
  const auto out = in / "fit";
  auto r = run(cat({"fit"}, cat(common(in), {"--out", out.string(), "--json"})));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto summary = slurp(out / "summary.csv");
  CHECK(summary.substr(0, summary.find('\n')) ==
        "name,coefficient,exp_coef,percent_change,std_err,z,p_value,crash_total,crash_share");
  const auto disp = json::parse(slurp(out / "dispersion.json"));
  CHECK(disp["overdispersed"] == true);
  CHECK(disp["selected_family"] == "negbin2");
  for (const char* f : {"model.json", "grid.csv", "coef_hour.csv", "coef_weekday.csv", "coef_month.csv",
                        "metrics.json", "config.json"}) {
    CHECK(fs::exists(out / f));
  }

  const auto forced = in / "poisson";
  r = run(cat({"fit"}, cat(common(in), {"--out", forced.string(), "--family", "poisson"})));
  REQUIRE(r.code == 0);
  CHECK(artifact::load_glm(slurp(forced / "model.json")).model.family == glm::Family::poisson);

  r = run({"rank", "--model", (out / "model.json").string(), "--month", "6", "--json"});
  REQUIRE(r.code == 0);
  const auto ranked = json::parse(r.out);
  CHECK(ranked.size() == 168);
  CHECK(ranked[0]["relative_risk"] == 1.0);
  r = run({"rank", "--model", (out / "model.json").string(), "--date", "2016-06-14", "--slots", "MO:8,FR:2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("traffic volume") != std::string::npos);

  const auto fo = in / "forest";
  r = run({"forest", "--grid", (out / "grid.csv").string(), "--out", fo.string(), "--trees", "4", "--sweep", "1,2,4"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(slurp(fo / "sweep.csv").rfind("n_trees,mae,r2\n", 0) == 0);
  std::istringstream imp(slurp(fo / "importance.csv"));
  std::string line;
  std::getline(imp, line);
  double total = 0.0;
  while (std::getline(imp, line)) total += std::stod(line.substr(line.rfind(',') + 1));
  CHECK(total == doctest::Approx(1.0));
  const auto again = in / "forest2";
  REQUIRE(run({"forest", "--grid", (out / "grid.csv").string(), "--out", again.string(), "--trees", "4", "--sweep",
               "1,2,4"})
              .code == 0);
  CHECK(slurp(fo / "forest.json") == slurp(again / "forest.json"));
  r = run({"rank", "--model", (fo / "forest.json").string(), "--use-forest", "--month", "2", "--json"});
  CHECK(r.code == 0);
  r = run({"rank", "--model", (fo / "forest.json").string(), "--month", "2"});
  CHECK(r.code == 3);
}

TEST_CASE("config file values are overridden by flags") {
  const auto dir = fs::path(testing_helpers::tmp_dir("cli_config"));
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << R"({"split_frac": 0.3, "seed": 5, "sweep": [1, 10], "coding": "full-dummy"})";
  }
  std::map<std::string, std::string> v{{"split-frac", "0.3"}, {"seed", "5"}};
  const auto c = cli::make_config("fit", v);
  CHECK(*c.split_frac == 0.3);
  CHECK(c.seed == 5);
  CHECK_THROWS_AS(cli::make_config("fit", {{"from", "2017-01-01"}, {"to", "2016-01-01"}}), Error);
  CHECK_THROWS_AS(cli::make_config("fit", {{"sweep", "1,x"}}), Error);
  const auto r = run({"rank", "--config", (dir / "c.json").string(), "--month", "2"});
  CHECK(r.code == 2);  // rank without --model
  CHECK(json::parse(r.err)["error"]["code"] == "missing_model");
}
