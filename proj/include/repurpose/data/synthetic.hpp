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
#include <vector>

#include "json.hpp"
#include "repurpose/core/video.hpp"

namespace repurpose::data {

/// Corpus generator settings. Clip statistics default to three ~60 s
/// clips per ten minutes of video.
struct SyntheticConfig {
  std::size_t num_videos = 20;
  double duration_min = 600.0;
  double duration_max = 1800.0;
  double segment_length = 1.0;
  double clip_density = 3.0;  // clips per 600 s
  double clip_duration_mean = 60.0;
  double clip_duration_std = 15.0;
  double clip_duration_min = 20.0;
  double clip_duration_max = 150.0;
  double signal_strength = 2.0;
  std::size_t ramp_width = 3;  // segments
  FeatureDims feature_dims{};
  double caption_span_min = 2.0;
  double caption_span_max = 8.0;
  double caption_gap_probability = 0.2;
  /// Limits each video's clip count to the evaluation top-k for its
  /// duration. Off by default.
  bool cap_clips_at_top_k = false;
  std::uint64_t seed = 0;

  /// Throws kInvalidConfig.
  void validate() const;
};

/// Builds the corpus. Each video gets unit-Gaussian features; segments
/// inside planted clips add a per-modality unit direction scaled by the
/// signal strength, and the `ramp_width` segments on either side of a
/// clip add a decaying half-strength copy. Captions are generated as
/// timed sentence spans and aligned to segments.
std::vector<VideoSample> generate_synthetic(const SyntheticConfig& config);

nlohmann::ordered_json to_json(const SyntheticConfig& config);
/// Missing keys keep their defaults.
SyntheticConfig synthetic_config_from_json(const nlohmann::ordered_json& j);

}  // namespace repurpose::data
