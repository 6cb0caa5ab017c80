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

#include "crashrisk/service.hpp"

#include <cmath>

#include <httplib.h>

#include "crashrisk/advisor.hpp"
#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"

namespace crashrisk::service {

namespace {

using json = nlohmann::json;

ApiResponse ok(const json& body) { return {200, body.dump()}; }

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json fit_meta(const glm::FittedGlm& m, const std::string& fingerprint) {
  return {{"n_obs", m.n_obs},
          {"converged", m.converged},
          {"iterations", m.iterations},
          {"log_likelihood", number(m.log_likelihood)},
          {"coding", m.schema.coding == features::Coding::reference_cell ? "reference" : "full-dummy"},
          {"precip_mode", m.schema.precip_mode == features::PrecipMode::indicator ? "indicator" : "inches"},
          {"identifiable", m.diagnostics.identifiable},
          {"rank", m.diagnostics.rank},
          {"warnings", m.diagnostics.warnings},
          {"data_fingerprint", m.data_fingerprint},
          {"fingerprint", fingerprint}};
}

// Maps an advisor validation code onto the request field it concerns.
std::string field_of(const Error& e) {
  const std::string& c = e.code();
  if (c == "hour" || c == "month" || c == "weekday") {
    const std::string msg = e.what();  // "slots[i].hour must ..."
    return msg.substr(0, msg.find(' '));
  }
  return c;
}

ApiResponse bad_field(const std::string& field, const std::string& message) {
  return api_error(400, "bad_request", message, json{{"field", field}});
}

}  // namespace

ApiResponse api_error(int status, std::string_view code, std::string_view message, const json& detail) {
  json body = {{"code", code}, {"message", message}};
  if (!detail.is_null()) body["detail"] = detail;
  return {status, body.dump()};
}

ServiceState load_state(const std::optional<std::string>& glm_path, const std::optional<std::string>& forest_path,
                        bool rank_with_forest) {
  ServiceState s;
  std::string glm_fp, forest_fp;
  if (glm_path) {
    const auto text = artifact::read_file(*glm_path);
    s.glm = artifact::load_glm(text);
    glm_fp = artifact::fingerprint(text);
  }
  if (forest_path) {
    const auto text = artifact::read_file(*forest_path);
    s.forest = artifact::load_forest(text);
    forest_fp = artifact::fingerprint(text);
  }
  if (rank_with_forest && !s.forest) throw Error(ErrorKind::usage, "missing_model", "forest ranking needs a forest");
  s.rank_with_forest = rank_with_forest;
  s.fingerprint = rank_with_forest ? forest_fp : glm_fp;
  return s;
}

ApiResponse handle_model(const ServiceState& state) {
  if (!state.glm) return api_error(404, "not_found", "no model artifact loaded");
  const auto& b = *state.glm;
  json rows = json::array(), reference_rows = json::array();
  for (const auto& r : b.summary) (r.reference ? reference_rows : rows).push_back(advisor::to_json(r));
  json doc = {{"family", glm::family_name(b.model.family)},
              {"alpha", number(b.model.alpha)},
              {"alpha_text", csv::format_double(b.model.alpha)},
              {"rows", std::move(rows)},
              {"reference_rows", std::move(reference_rows)},
              {"dispersion", nullptr},
              {"fit_meta", fit_meta(b.model, state.fingerprint)},
              {"caveat", advisor::kExposureCaveat}};
  if (b.dispersion) {
    const auto& d = *b.dispersion;
    doc["dispersion"] = {{"pearson_ratio", number(d.pearson_ratio)}, {"ct_coefficient", number(d.ct_coefficient)},
                         {"ct_t", number(d.ct_t)},                   {"ct_p_value", number(d.ct_p_value)},
                         {"overdispersed", d.overdispersed}};
  }
  return ok(doc);
}

ApiResponse handle_rank(const ServiceState& state, std::string_view body) {
  if (state.rank_with_forest ? !state.forest : !state.glm) {
    return api_error(404, "not_found", "no model artifact loaded");
  }
  json req;
  try {
    req = json::parse(body.begin(), body.end());
  } catch (const json::exception&) {
    return bad_field("body", "request body is not valid JSON");
  }
  if (!req.is_object()) return bad_field("body", "request body must be an object");
  if (!req.contains("slots") || !req["slots"].is_array()) return bad_field("slots", "slots must be an array");

  advisor::SlotQuery q;
  const auto& slots = req["slots"];
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& s = slots[i];
    const std::string at = "slots[" + std::to_string(i) + "]";
    if (!s.is_object()) return bad_field(at, at + " must be an object");
    advisor::Slot slot;
    const auto wd = s.find("weekday");
    std::optional<Weekday> weekday;
    if (wd != s.end() && wd->is_string()) {
      weekday = parse_weekday(wd->get<std::string>());
    } else if (wd != s.end() && wd->is_number_integer()) {
      const auto v = wd->get<long long>();
      if (v >= 0 && v < kWeekdays) weekday = static_cast<Weekday>(v);
    }
    if (!weekday) return bad_field(at + ".weekday", at + ".weekday must be MO..SU or 0..6");
    slot.weekday = *weekday;
    const auto h = s.find("hour");
    if (h == s.end() || !h->is_number_integer()) return bad_field(at + ".hour", at + ".hour must be an integer");
    const auto m = s.find("month");
    if (m == s.end() || !m->is_number_integer()) return bad_field(at + ".month", at + ".month must be an integer");
    const auto hv = h->get<long long>();
    const auto mv = m->get<long long>();
    if (hv < 0 || hv >= kHours) return bad_field(at + ".hour", at + ".hour must lie in 0..23");
    if (mv < 1 || mv > kMonths) return bad_field(at + ".month", at + ".month must lie in 1..12");
    slot.hour = static_cast<int>(hv);
    slot.month = static_cast<int>(mv);
    q.slots.push_back(slot);
  }
  if (req.contains("precip") && !req["precip"].is_null()) {
    if (!req["precip"].is_number()) return bad_field("precip", "precip must be a number");
    q.precip = req["precip"].get<double>();
  }
  try {
    const auto ranked =
        state.rank_with_forest ? advisor::rank_slots(*state.forest, q) : advisor::rank_slots(state.glm->model, q);
    return ok(advisor::to_json(ranked));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::usage) return bad_field(field_of(e), e.what());
    return api_error(500, "model_error", e.what());
  }
}

ApiResponse handle_heatmap(const ServiceState& state, const std::optional<std::string>& month,
                           const std::optional<std::string>& precip) {
  if (!state.glm) return api_error(404, "not_found", "no model artifact loaded");
  if (!month) return bad_field("month", "month is required");
  const auto m = csv::parse_int(*month);
  if (!m || *m < 1 || *m > kMonths) return bad_field("month", "month must lie in 1..12");
  double p = 0.0;
  if (precip) {
    const auto v = csv::parse_double(*precip);
    if (!v) return bad_field("precip", "precip must be a number");
    p = *v;
  }
  try {
    const auto h = advisor::heatmap(state.glm->model, static_cast<int>(*m), p);
    json cells = json::array();
    for (int w = 0; w < kWeekdays; ++w) {
      json row = json::array();
      for (int hour = 0; hour < kHours; ++hour) row.push_back(number(h.cells[static_cast<std::size_t>(w * kHours + hour)]));
      cells.push_back(std::move(row));
    }
    json weekdays = json::array();
    for (int w = 0; w < kWeekdays; ++w) weekdays.push_back(std::string(weekday_code(static_cast<Weekday>(w))));
    return ok({{"month", h.month},
               {"precip", h.precip},
               {"weekdays", std::move(weekdays)},
               {"hours", kHours},
               {"cells", std::move(cells)},
               {"min", number(h.min)},
               {"max", number(h.max)}});
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::usage) return bad_field(e.code(), e.what());
    return api_error(500, "model_error", e.what());
  }
}

Endpoint parse_bind(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw Error(ErrorKind::usage, "bad_bind", "--bind expects HOST:PORT");
  Endpoint e;
  if (colon > 0) e.host = std::string(text.substr(0, colon));
  const auto port = csv::parse_int(text.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw Error(ErrorKind::usage, "bad_bind", "port must lie in 0..65535");
  e.port = static_cast<int>(*port);
  return e;
}

bool serve(const ServiceState& state, const Endpoint& bind, const std::optional<std::string>& static_dir) {
  httplib::Server server;
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get("/api/v1/model", [&](const httplib::Request&, httplib::Response& res) { reply(res, handle_model(state)); });
  server.Post("/api/v1/rank",
              [&](const httplib::Request& req, httplib::Response& res) { reply(res, handle_rank(state, req.body)); });
  server.Get("/api/v1/heatmap", [&](const httplib::Request& req, httplib::Response& res) {
    auto param = [&](const char* name) -> std::optional<std::string> {
      if (!req.has_param(name)) return std::nullopt;
      return req.get_param_value(name);
    };
    reply(res, handle_heatmap(state, param("month"), param("precip")));
  });
  if (static_dir) {
    if (!server.set_mount_point("/", *static_dir)) {
      throw Error(ErrorKind::usage, "bad_static", "static directory not found: " + *static_dir);
    }
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!doctype html><title>crashrisk</title><p>API: <code>GET /api/v1/model</code>, "
          "<code>POST /api/v1/rank</code>, <code>GET /api/v1/heatmap?month=6&amp;precip=0</code></p>",
          "text/html");
    });
  }
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto r = api_error(res.status, res.status == 404 ? "not_found" : "bad_request",
                             res.status == 404 ? "no such resource" : "request rejected");
    res.set_content(r.body, "application/json");
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    const auto r = api_error(500, "model_error", "internal error");
    res.status = 500;
    res.set_content(r.body, "application/json");
  });
  server.set_post_routing_handler([&](const httplib::Request&, httplib::Response& res) {
    res.set_header(kFingerprintHeader, state.fingerprint);
  });
  return server.listen(bind.host, bind.port);
}

}  // namespace crashrisk::service
