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

#include "crashrisk/cli.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "crashrisk/advisor.hpp"
#include "crashrisk/artifact.hpp"
#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"
#include "crashrisk/forest.hpp"
#include "crashrisk/glm.hpp"
#include "crashrisk/hash.hpp"
#include "crashrisk/ingest.hpp"

namespace crashrisk::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void usage(std::string code, const std::string& message) {
  throw Error(ErrorKind::usage, std::move(code), message);
}

const std::vector<std::string> kValueFlags = {"crash",  "weather", "grid",  "model",   "forest",     "from",
                                              "to",     "coding",  "precip", "split-frac", "split",  "seed",
                                              "family", "trees",   "sweep", "threads", "out",        "bind",
                                              "static", "month",   "date",  "slots",   "assume-precip"};
const std::vector<std::string> kBoolFlags = {"json", "use-forest"};

std::optional<std::string> get(const std::map<std::string, std::string>& v, const std::string& key) {
  const auto it = v.find(key);
  if (it == v.end()) return std::nullopt;
  return it->second;
}

Date date_flag(const std::string& name, const std::string& text) {
  const auto d = parse_date(text);
  if (!d) usage("bad_date", "--" + name + " expects YYYY-MM-DD, got '" + text + "'");
  return *d;
}

long long int_flag(const std::string& name, const std::string& text, long long lo, long long hi) {
  const auto v = csv::parse_int(text);
  if (!v || *v < lo || *v > hi) {
    usage("bad_" + name, "--" + name + " expects an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "], got '" + text + "'");
  }
  return *v;
}

double real_flag(const std::string& name, const std::string& text) {
  const auto v = csv::parse_double(text);
  if (!v || !std::isfinite(*v)) usage("bad_" + name, "--" + name + " expects a number, got '" + text + "'");
  return *v;
}

bool bool_value(const std::string& name, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  usage("bad_" + name, "--" + name + " expects true or false");
}

std::string coding_name(features::Coding c) {
  return c == features::Coding::reference_cell ? "reference" : "full-dummy";
}

std::string family_choice_name(FamilyChoice f) {
  switch (f) {
    case FamilyChoice::poisson:
      return "poisson";
    case FamilyChoice::negbin:
      return "negbin";
    default:
      return "auto";
  }
}

std::vector<advisor::Slot> parse_slots(const std::string& text, int month) {
  std::vector<advisor::Slot> slots;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) usage("bad_slots", "--slots expects DAY:HOUR items, got '" + item + "'");
    const auto wd = parse_weekday(csv::trim(std::string_view(item).substr(0, colon)));
    if (!wd) usage("bad_slots", "unknown weekday in '" + item + "'");
    const auto hour = int_flag("slots", std::string(csv::trim(std::string_view(item).substr(colon + 1))), 0, 23);
    slots.push_back({*wd, static_cast<int>(hour), month});
  }
  if (slots.empty()) usage("bad_slots", "--slots is empty");
  return slots;
}

std::string file_digest(const std::string& path) { return sha256_hex(artifact::read_file(path)); }

fs::path require_out(const RunConfig& c) {
  const fs::path dir = c.out_dir.value_or("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::data, "io", "cannot create output directory " + dir.string());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) { artifact::write_file(path.string(), text); }

void echo_config(const RunConfig& c, const fs::path& dir) {
  json doc = {{"config", to_json(c)}, {"inputs", json::object()}};
  for (const auto& [key, path] : {std::pair{"crash", c.crash}, std::pair{"weather", c.weather},
                                  std::pair{"grid", c.grid}, std::pair{"model", c.model},
                                  std::pair{"forest", c.forest}}) {
    if (path) doc["inputs"][key] = {{"path", *path}, {"sha256", file_digest(*path)}};
  }
  write_text(dir / "config.json", doc.dump(2) + "\n");
}

struct LoadedGrid {
  std::vector<ingest::HourlyObservation> grid;
  json report;
};

LoadedGrid load_grid(const RunConfig& c) {
  LoadedGrid g;
  if (c.grid) {
    std::ifstream in(*c.grid, std::ios::binary);
    if (!in) throw Error(ErrorKind::data, "io", "cannot open " + *c.grid);
    g.grid = ingest::read_grid_csv(in);
    g.report = {{"grid_rows", g.grid.size()}};
    return g;
  }
  if (!c.crash || !c.weather) usage("missing_input", "need --grid, or both --crash and --weather");
  std::ifstream crash_in(*c.crash, std::ios::binary);
  if (!crash_in) throw Error(ErrorKind::data, "io", "cannot open " + *c.crash);
  std::ifstream weather_in(*c.weather, std::ios::binary);
  if (!weather_in) throw Error(ErrorKind::data, "io", "cannot open " + *c.weather);
  const auto crashes = ingest::parse_crash_csv(crash_in, c.range);
  const auto weather = ingest::parse_weather_csv(weather_in, c.range);
  g.grid = ingest::build_hourly_grid(crashes.records, weather.days, c.range);
  std::size_t zero_hours = 0;
  long long total = 0;
  for (const auto& o : g.grid) {
    zero_hours += o.crash_count == 0;
    total += o.crash_count;
  }
  const auto& cr = crashes.report;
  const auto& wr = weather.report;
  g.report = {{"crash",
               {{"rows_read", cr.rows_read},
                {"retained", cr.retained},
                {"duplicates_dropped", cr.duplicates},
                {"unparseable", cr.unparseable},
                {"out_of_range", cr.out_of_range}}},
              {"weather",
               {{"rows_read", wr.rows_read},
                {"duplicates_resolved", wr.duplicates_resolved},
                {"missing_precipitation", wr.missing_precipitation},
                {"out_of_range", wr.out_of_range}}},
              {"grid_rows", g.grid.size()},
              {"total_crashes", total},
              {"zero_filled_hours", zero_hours}};
  return g;
}

void write_grid(const fs::path& dir, std::span<const ingest::HourlyObservation> grid) {
  std::ostringstream ss;
  ingest::write_grid_csv(ss, grid);
  write_text(dir / "grid.csv", ss.str());
}

json dispersion_json(const glm::DispersionReport& d) {
  return {{"pearson_ratio", d.pearson_ratio},
          {"ct_coefficient", d.ct_coefficient},
          {"ct_t", d.ct_t},
          {"ct_p_value", d.ct_p_value},
          {"overdispersed", d.overdispersed}};
}

int cmd_ingest(const RunConfig& c, std::ostream& out) {
  if (!c.crash || !c.weather) usage("missing_input", "ingest needs --crash and --weather");
  const auto dir = require_out(c);
  const auto g = load_grid(c);
  write_grid(dir, g.grid);
  write_text(dir / "ingest_report.json", g.report.dump(2) + "\n");
  echo_config(c, dir);
  if (c.json) {
    out << g.report.dump() << '\n';
  } else {
    out << "grid rows: " << g.report["grid_rows"] << ", crashes: " << g.report["total_crashes"]
        << ", duplicates dropped: " << g.report["crash"]["duplicates_dropped"] << '\n';
  }
  return 0;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  const auto dir = require_out(c);
  const auto g = load_grid(c);
  const auto design = features::build_design(g.grid, c.schema);
  features::SplitIndices idx;
  const double frac = c.split_frac.value_or(0.2);
  if (frac > 0.0) {
    idx = features::split_indices(design.rows(), frac, c.seed, c.split);
  } else {
    idx.train.resize(design.rows());
    std::iota(idx.train.begin(), idx.train.end(), std::size_t{0});
  }
  const auto train = features::select_rows(design, idx.train);
  std::vector<ingest::HourlyObservation> train_grid;
  train_grid.reserve(idx.train.size());
  for (auto i : idx.train) train_grid.push_back(g.grid[i]);

  const auto poisson = glm::fit_poisson(train);
  const auto disp = glm::dispersion_check(poisson, train);
  const bool use_nb =
      c.family == FamilyChoice::negbin || (c.family == FamilyChoice::automatic && disp.overdispersed);
  artifact::GlmBundle bundle{use_nb ? glm::fit_negbin(train) : poisson, disp, {}};
  bundle.summary = advisor::summarize(bundle.model, train_grid);

  json metrics = {{"family", glm::family_name(bundle.model.family)},
                  {"alpha", bundle.model.alpha},
                  {"converged", bundle.model.converged},
                  {"iterations", bundle.model.iterations},
                  {"log_likelihood", bundle.model.log_likelihood},
                  {"train_rows", idx.train.size()},
                  {"test_rows", idx.test.size()},
                  {"test_rmse", nullptr},
                  {"warnings", bundle.model.diagnostics.warnings}};
  if (!idx.test.empty()) metrics["test_rmse"] = glm::rmse(bundle.model, features::select_rows(design, idx.test));

  write_grid(dir, g.grid);
  write_text(dir / "model.json", artifact::save_glm(bundle));
  std::ostringstream summary;
  advisor::write_summary_csv(summary, bundle.summary);
  write_text(dir / "summary.csv", summary.str());
  json disp_doc = dispersion_json(disp);
  disp_doc["poisson_log_likelihood"] = poisson.log_likelihood;
  disp_doc["family_choice"] = family_choice_name(c.family);
  disp_doc["selected_family"] = glm::family_name(bundle.model.family);
  write_text(dir / "dispersion.json", disp_doc.dump(2) + "\n");
  for (const auto& [name, cat] : {std::pair{"coef_hour.csv", advisor::Category::hour},
                                  std::pair{"coef_weekday.csv", advisor::Category::weekday},
                                  std::pair{"coef_month.csv", advisor::Category::month}}) {
    std::ostringstream ss;
    advisor::write_category_csv(ss, bundle.summary, cat);
    write_text(dir / name, ss.str());
  }
  write_text(dir / "metrics.json", metrics.dump(2) + "\n");
  echo_config(c, dir);

  if (c.json) {
    out << json{{"dispersion", dispersion_json(disp)}, {"metrics", metrics}}.dump() << '\n';
  } else {
    out << "pearson ratio " << disp.pearson_ratio << ", auxiliary slope " << disp.ct_coefficient << " (p "
        << disp.ct_p_value << "): " << (disp.overdispersed ? "overdispersed" : "not overdispersed") << '\n';
    out << "family " << glm::family_name(bundle.model.family) << ", alpha " << bundle.model.alpha;
    if (!metrics["test_rmse"].is_null()) out << ", test rmse " << metrics["test_rmse"].get<double>();
    out << '\n';
    for (const auto& w : bundle.model.diagnostics.warnings) out << "warning: " << w << '\n';
  }
  return 0;
}

int cmd_forest(const RunConfig& c, std::ostream& out) {
  const auto dir = require_out(c);
  const auto g = load_grid(c);
  const auto design = features::build_design(g.grid, c.schema);
  std::vector<std::size_t> sizes = c.sweep;
  if (std::find(sizes.begin(), sizes.end(), c.trees) == sizes.end()) {
    sizes.push_back(c.trees);
    std::sort(sizes.begin(), sizes.end());
  }
  forest::ForestParams params;
  params.threads = c.threads;
  const double frac = c.split_frac.value_or(0.25);
  if (frac <= 0.0) usage("bad_split-frac", "forest evaluation needs --split-frac > 0");
  const auto sweep = forest::estimator_sweep(design, sizes, c.seed, params, frac);
  const auto model = forest::truncate(sweep.largest, c.trees);

  std::vector<forest::SweepRow> rows;
  for (const auto& r : sweep.rows) {
    if (std::find(c.sweep.begin(), c.sweep.end(), r.n_trees) != c.sweep.end()) rows.push_back(r);
  }
  write_text(dir / "forest.json", artifact::save_forest(model));
  std::ostringstream sw, imp;
  forest::write_sweep_csv(sw, rows);
  forest::write_importance_csv(imp, model);
  write_text(dir / "sweep.csv", sw.str());
  write_text(dir / "importance.csv", imp.str());
  echo_config(c, dir);

  if (c.json) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"n_trees", r.n_trees}, {"mae", r.mae}, {"r2", r.r2}});
    out << arr.dump() << '\n';
  } else {
    out << "n_trees        mae         r2\n";
    char line[80];
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%7zu %10.4f %10.4f\n", r.n_trees, r.mae, r.r2);
      out << line;
    }
  }
  return 0;
}

int cmd_rank(const RunConfig& c, std::ostream& out) {
  if (!c.model) usage("missing_model", "rank needs --model");
  if (!c.month) usage("missing_month", "rank needs --month or --date");
  advisor::SlotQuery q;
  q.slots = c.slots ? parse_slots(*c.slots, *c.month) : advisor::all_slots(*c.month);
  q.precip = c.assume_precip;
  const auto text = artifact::read_file(*c.model);
  std::vector<advisor::RankedSlot> ranked;
  if (c.use_forest) {
    ranked = advisor::rank_slots(artifact::load_forest(text), q);
  } else {
    ranked = advisor::rank_slots(artifact::load_glm(text).model, q);
  }
  const auto doc = advisor::to_json(ranked);
  if (c.out_dir) {
    const auto dir = require_out(c);
    write_text(dir / "ranked.json", doc.dump(2) + "\n");
    echo_config(c, dir);
  }
  if (c.json) {
    out << doc.dump() << '\n';
  } else {
    advisor::write_ranking_table(out, ranked);
  }
  return 0;
}

int cmd_serve(const RunConfig& c, std::ostream& out) {
  if (!c.model && !c.forest) usage("missing_model", "serve needs --model and/or --forest");
  std::optional<std::string> forest_path = c.forest;
  if (c.use_forest && !forest_path) forest_path = c.model;
  const auto glm_path = c.use_forest && !c.forest ? std::optional<std::string>{} : c.model;
  const auto state = service::load_state(glm_path, forest_path, c.use_forest);
  out << "serving on http://" << c.bind.host << ':' << c.bind.port << std::endl;
  if (!service::serve(state, c.bind, c.static_dir)) {
    throw Error(ErrorKind::usage, "bind_failed", "cannot listen on " + c.bind.host + ":" + std::to_string(c.bind.port));
  }
  return 0;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + config_value(x);
    return s;
  }
  return v.dump();
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  json doc;
  try {
    doc = json::parse(artifact::read_file(path));
  } catch (const json::exception&) {
    usage("bad_config", "config file is not valid JSON: " + path);
  }
  if (!doc.is_object()) usage("bad_config", "config file must hold a JSON object");
  std::map<std::string, std::string> values;
  for (const auto& [key, v] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const bool known = std::find(kValueFlags.begin(), kValueFlags.end(), flag) != kValueFlags.end() ||
                       std::find(kBoolFlags.begin(), kBoolFlags.end(), flag) != kBoolFlags.end();
    if (!known) usage("bad_config", "unknown config key '" + key + "'");
    if (!v.is_null()) values[flag] = config_value(v);
  }
  return values;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& code, const std::string& message,
                const json& detail = nullptr) {
  json e = {{"kind", kind}, {"code", code}, {"message", message}};
  if (!detail.is_null()) e["detail"] = detail;
  err << json{{"error", e}}.dump() << std::endl;
}

}  // namespace

RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& v) {
  RunConfig c;
  c.command = command;
  c.crash = get(v, "crash");
  c.weather = get(v, "weather");
  c.grid = get(v, "grid");
  c.model = get(v, "model");
  c.forest = get(v, "forest");
  c.out_dir = get(v, "out");
  c.static_dir = get(v, "static");
  if (auto s = get(v, "from")) c.range.first = date_flag("from", *s);
  if (auto s = get(v, "to")) c.range.last = date_flag("to", *s);
  if (c.range.days() <= 0) usage("bad_range", "--from must not be after --to");
  if (auto s = get(v, "coding")) {
    if (*s == "reference") {
      c.schema.coding = features::Coding::reference_cell;
    } else if (*s == "full-dummy") {
      c.schema.coding = features::Coding::full_dummy;
    } else {
      usage("bad_coding", "--coding expects reference or full-dummy");
    }
  }
  if (auto s = get(v, "precip")) {
    if (*s == "indicator") {
      c.schema.precip_mode = features::PrecipMode::indicator;
    } else if (*s == "inches") {
      c.schema.precip_mode = features::PrecipMode::inches;
    } else {
      usage("bad_precip", "--precip expects indicator or inches");
    }
  }
  if (auto s = get(v, "split-frac")) {
    c.split_frac = real_flag("split-frac", *s);
    if (*c.split_frac < 0.0 || *c.split_frac >= 1.0) usage("bad_split-frac", "--split-frac must lie in [0, 1)");
  }
  if (auto s = get(v, "split")) {
    if (*s == "random") {
      c.split = features::SplitMethod::random;
    } else if (*s == "chrono") {
      c.split = features::SplitMethod::chronological;
    } else {
      usage("bad_split", "--split expects random or chrono");
    }
  }
  if (auto s = get(v, "seed")) {
    std::uint64_t seed = 0;
    const auto r = std::from_chars(s->data(), s->data() + s->size(), seed);
    if (r.ec != std::errc{} || r.ptr != s->data() + s->size()) usage("bad_seed", "--seed expects an unsigned integer");
    c.seed = seed;
  }
  if (auto s = get(v, "family")) {
    if (*s == "auto") {
      c.family = FamilyChoice::automatic;
    } else if (*s == "poisson") {
      c.family = FamilyChoice::poisson;
    } else if (*s == "negbin" || *s == "negbin2") {
      c.family = FamilyChoice::negbin;
    } else {
      usage("bad_family", "--family expects auto, poisson or negbin");
    }
  }
  if (auto s = get(v, "trees")) c.trees = static_cast<std::size_t>(int_flag("trees", *s, 1, 100000));
  if (auto s = get(v, "sweep")) {
    c.sweep.clear();
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      c.sweep.push_back(static_cast<std::size_t>(int_flag("sweep", std::string(csv::trim(item)), 1, 100000)));
    }
    if (c.sweep.empty()) usage("bad_sweep", "--sweep is empty");
    std::sort(c.sweep.begin(), c.sweep.end());
    c.sweep.erase(std::unique(c.sweep.begin(), c.sweep.end()), c.sweep.end());
  }
  if (auto s = get(v, "threads")) c.threads = static_cast<std::size_t>(int_flag("threads", *s, 1, 1024));
  if (auto s = get(v, "month")) c.month = static_cast<int>(int_flag("month", *s, 1, 12));
  if (auto s = get(v, "date")) {
    const int m = month_of(date_flag("date", *s));
    if (c.month && *c.month != m) usage("bad_month", "--month disagrees with --date");
    c.month = m;
  }
  c.slots = get(v, "slots");
  if (c.slots && c.month) parse_slots(*c.slots, *c.month);
  if (auto s = get(v, "assume-precip")) {
    c.assume_precip = real_flag("assume-precip", *s);
    if (*c.assume_precip < 0.0) usage("bad_assume-precip", "--assume-precip must be >= 0");
  }
  if (auto s = get(v, "use-forest")) c.use_forest = bool_value("use-forest", *s);
  if (auto s = get(v, "json")) c.json = bool_value("json", *s);
  if (auto s = get(v, "bind")) c.bind = service::parse_bind(*s);
  return c;
}

json to_json(const RunConfig& c) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  return {{"command", c.command},
          {"crash", opt(c.crash)},
          {"weather", opt(c.weather)},
          {"grid", opt(c.grid)},
          {"model", opt(c.model)},
          {"forest", opt(c.forest)},
          {"out", opt(c.out_dir)},
          {"from", format_date(c.range.first)},
          {"to", format_date(c.range.last)},
          {"coding", coding_name(c.schema.coding)},
          {"precip", c.schema.precip_mode == features::PrecipMode::indicator ? "indicator" : "inches"},
          {"split_frac", c.split_frac ? json(*c.split_frac) : json(nullptr)},
          {"split", c.split == features::SplitMethod::random ? "random" : "chrono"},
          {"seed", c.seed},
          {"family", family_choice_name(c.family)},
          {"trees", c.trees},
          {"sweep", c.sweep},
          {"threads", c.threads},
          {"month", c.month ? json(*c.month) : json(nullptr)},
          {"slots", opt(c.slots)},
          {"assume_precip", c.assume_precip ? json(*c.assume_precip) : json(nullptr)},
          {"use_forest", c.use_forest},
          {"json", c.json},
          {"bind", c.bind.host + ":" + std::to_string(c.bind.port)},
          {"static", opt(c.static_dir)}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hourly crash-count modelling and commute advisor"};
  app.require_subcommand(1);
  std::map<std::string, std::string> raw;
  std::map<std::string, bool> raw_bool;
  std::string config_path;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"ingest", "build the hourly crash grid"},
      {"fit", "fit Poisson / negative binomial models"},
      {"forest", "train random forests and sweep forest sizes"},
      {"rank", "rank commute slots by expected crash count"},
      {"serve", "serve the JSON API"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON file of option values; flags override it");
    for (const auto& flag : kValueFlags) sub->add_option("--" + flag, raw[flag]);
    for (const auto& flag : kBoolFlags) sub->add_flag("--" + flag, raw_bool[flag]);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", "bad_arguments", e.what());
    return exit_code(ErrorKind::usage);
  }
  try {
    const auto* sub = app.get_subcommands().front();
    std::map<std::string, std::string> values;
    if (!config_path.empty()) values = read_config_file(config_path);
    for (const auto& flag : kValueFlags) {
      if (sub->count("--" + flag) > 0) values[flag] = raw[flag];
    }
    for (const auto& flag : kBoolFlags) {
      if (sub->count("--" + flag) > 0) values[flag] = "true";
    }
    const auto config = make_config(sub->get_name(), values);
    if (config.command == "ingest") return cmd_ingest(config, out);
    if (config.command == "fit") return cmd_fit(config, out);
    if (config.command == "forest") return cmd_forest(config, out);
    if (config.command == "rank") return cmd_rank(config, out);
    return cmd_serve(config, out);
  } catch (const ingest::WeatherGapError& e) {
    json missing = json::array();
    for (const auto& d : e.missing_dates()) missing.push_back(format_date(d));
    emit_error(err, kind_name(e.kind()), e.code(), e.what(), json{{"missing_dates", missing}});
    return exit_code(e.kind());
  } catch (const glm::ConvergenceError& e) {
    emit_error(err, kind_name(e.kind()), e.code(), e.what(),
               json{{"iterations", e.iterations()}, {"last_alpha", e.last_alpha()}, {"last_beta", e.last_beta()}});
    return exit_code(e.kind());
  } catch (const numerics::SingularSystemError& e) {
    emit_error(err, kind_name(e.kind()), e.code(), e.what(), json{{"dependent_columns", e.dependent_columns()}});
    return exit_code(e.kind());
  } catch (const Error& e) {
    emit_error(err, kind_name(e.kind()), e.code(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    emit_error(err, "internal", "internal", e.what());
    return 1;
  }
}

}  // namespace crashrisk::cli
