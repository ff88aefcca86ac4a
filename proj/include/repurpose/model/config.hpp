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

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "repurpose/core/video.hpp"

namespace repurpose::model {

/// Which input modalities the network consumes.
struct ModalitySet {
  bool visual = true;
  bool audio = true;
  bool caption = true;

  bool empty() const noexcept { return !visual && !audio && !caption; }
  /// Uni-modal visual/audio heads exist only when both streams do.
  bool has_branch_heads() const noexcept { return visual && audio; }

  /// "A", "V", "C", "A&V", "A&V&C", ...
  std::string to_string() const;
  /// Accepts the forms produced by to_string() plus compact ones ("AV").
  static ModalitySet parse(std::string_view text);

  bool operator==(const ModalitySet&) const = default;
};

struct ModelConfig {
  std::size_t d_model = 512;
  std::size_t n_self_layers = 3;
  std::size_t n_caption_layers = 3;
  std::size_t n_fusion_layers = 3;
  std::size_t n_heads = 8;
  float dropout = 0.1f;
  FeatureDims input_dims{};
  std::size_t head_hidden = 512;
  std::size_t ffn_multiplier = 4;
  bool positional_encoding = true;
  /// Seconds represented by one unit of the rectified regression output.
  double regression_scale = 1.0;
  ModalitySet modalities{};

  /// Throws kInvalidConfig.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

nlohmann::ordered_json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::ordered_json& j);

}  // namespace repurpose::model
