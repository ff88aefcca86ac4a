// Copyright 2026 The repurpose-loc Authors
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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "repurpose/autograd/tape.hpp"
#include "repurpose/model/config.hpp"

namespace repurpose::model {

class Network;

inline constexpr std::string_view kCheckpointFormat = "repurpose-loc/ckpt-v1";

/// Layout on disk:
///   line 1   format tag followed by '\n'
///   8 bytes  little-endian header length
///   header   JSON {"format", "kind", "model", "parameters": [{"name", "shape"}], "metadata"}
///   payload  parameter values as little-endian float32, in header order
///
/// `kind` is "network" for trained weights and "oracle" for a
/// ground-truth predictor fixture that carries no parameters.
struct Checkpoint {
  std::string kind = "network";
  ModelConfig model;
  std::vector<autograd::Parameter> parameters;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// Writes through a temporary file and renames it into place.
/// Throws kCheckpointWriteError.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws kIoError, kCorruptContainer.
Checkpoint read_checkpoint(const std::filesystem::path& path);

Checkpoint snapshot(const Network& network, nlohmann::ordered_json metadata = nlohmann::ordered_json::object());
/// Copies values into `network`; names and shapes must match exactly
/// (kConfigMismatch otherwise).
void restore(Network& network, const Checkpoint& checkpoint);
/// Builds a network from the stored config and restores its weights.
Network instantiate(const Checkpoint& checkpoint);

/// Checks the stored input widths against data widths; kConfigMismatch
/// names both values on disagreement.
void require_compatible(const ModelConfig& model, const FeatureDims& data);

}  // namespace repurpose::model
