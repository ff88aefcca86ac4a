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
#include <vector>

#include "repurpose/core/interval.hpp"
#include "repurpose/tensor/matrix.hpp"

namespace repurpose {

/// Time-stamped caption sentence. `embedding` is empty until encoded.
struct CaptionSpan {
  Interval interval;
  std::string text;
  std::vector<float> embedding;
};

enum class Modality { kVisual, kAudio, kCaption };

struct FeatureDims {
  std::size_t visual = 512;
  std::size_t audio = 2048;
  std::size_t caption = 384;

  bool operator==(const FeatureDims&) const = default;
};

/// One long video with segment-aligned features for the three modalities.
struct VideoSample {
  std::string video_id;
  double duration = 0.0;
  double segment_length = 1.0;
  Matrix visual;
  Matrix audio;
  Matrix caption;
  /// 1 where no caption span overlaps the segment.
  std::vector<std::uint8_t> caption_empty;
  std::vector<Interval> clips;
  std::vector<CaptionSpan> caption_spans;
  /// Non-fatal conditions met while building the sample.
  std::vector<std::string> warnings;

  std::size_t num_segments() const noexcept { return visual.rows(); }
  FeatureDims dims() const noexcept { return {visual.cols(), audio.cols(), caption.cols()}; }

  /// Throws on any violated invariant (row counts, clip range, flag length).
  void validate() const;
};

}  // namespace repurpose
