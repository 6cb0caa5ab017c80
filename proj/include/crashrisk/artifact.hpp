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
#include <vector>

#include "crashrisk/forest.hpp"
#include "crashrisk/glm.hpp"

namespace crashrisk::artifact {

/// Artifacts are JSON envelopes {format, version, checksum, payload}. The
/// checksum is the SHA-256 of the compact payload dump (keys sorted). Readers
/// accept any minor version of their major version.
inline constexpr int kMajorVersion = 1;
inline constexpr int kMinorVersion = 0;
inline constexpr const char* kGlmFormat = "crashrisk.glm";
inline constexpr const char* kForestFormat = "crashrisk.forest";

enum class Kind { glm, forest };

/// A fitted GLM with the reports produced alongside it.
struct GlmBundle {
  glm::FittedGlm model;
  std::optional<glm::DispersionReport> dispersion;
  std::vector<glm::CoefficientRow> summary;
};

std::string save_glm(const GlmBundle& bundle);
std::string save_forest(const forest::ForestModel& model);

/// Verify the envelope first; nothing is decoded from a corrupt artifact.
/// Errors are Error(artifact) with code artifact_checksum, artifact_version or
/// artifact_format.
GlmBundle load_glm(std::string_view text);
forest::ForestModel load_forest(std::string_view text);

Kind kind_of(std::string_view text);
/// The verified payload checksum, used as the model fingerprint.
std::string fingerprint(std::string_view text);

/// Whole-file helpers; read failures are Error(data, "io").
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace crashrisk::artifact
