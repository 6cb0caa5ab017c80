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

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "crashrisk/artifact.hpp"

namespace crashrisk::service {

/// Loaded once at startup, never mutated afterwards.
struct ServiceState {
  std::optional<artifact::GlmBundle> glm;
  std::optional<forest::ForestModel> forest;
  bool rank_with_forest = false;
  std::string fingerprint;  // checksum of the ranking artifact, empty when none
};

/// Reads the artifacts named (either may be absent). Artifact errors propagate.
ServiceState load_state(const std::optional<std::string>& glm_path, const std::optional<std::string>& forest_path,
                        bool rank_with_forest);

struct ApiResponse {
  int status = 200;
  std::string body;  // application/json
};

inline constexpr const char* kFingerprintHeader = "X-Model-Fingerprint";

/// Body of every non-2xx response: {"code", "message", "detail"?}.
ApiResponse api_error(int status, std::string_view code, std::string_view message,
                      const nlohmann::json& detail = nullptr);

/// GET /api/v1/model
ApiResponse handle_model(const ServiceState& state);
/// POST /api/v1/rank
ApiResponse handle_rank(const ServiceState& state, std::string_view body);
/// GET /api/v1/heatmap?month=M&precip=P
ApiResponse handle_heatmap(const ServiceState& state, const std::optional<std::string>& month,
                           const std::optional<std::string>& precip);

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// "HOST:PORT" or ":PORT". Throws Error(usage).
Endpoint parse_bind(std::string_view text);

/// Blocks serving the API, plus files under `static_dir` at "/". Returns
/// false when the socket cannot be bound.
bool serve(const ServiceState& state, const Endpoint& bind, const std::optional<std::string>& static_dir);

}  // namespace crashrisk::service
