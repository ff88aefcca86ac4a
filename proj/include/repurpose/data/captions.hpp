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
#include <span>
#include <vector>

#include "repurpose/core/video.hpp"
#include "repurpose/tensor/matrix.hpp"

namespace repurpose::data {

struct AlignedCaptions {
  Matrix features;                  // [T x D_c]
  std::vector<std::uint8_t> empty;  // 1 where no span overlaps the segment
};

/// Assigns each segment the embedding of the caption span overlapping its
/// window the most; a span covering several segments is duplicated into
/// each. Ties go to the earlier span. Segments without overlap receive
/// `empty_embedding` (zeros when it is empty) and an empty flag. Spans are
/// clipped to [0, T * segment_length].
AlignedCaptions align_captions(std::span<const CaptionSpan> spans, std::size_t num_segments,
                               double segment_length, std::size_t embedding_dim,
                               std::span<const float> empty_embedding = {});

/// Empty flags alone, from span timing.
std::vector<std::uint8_t> caption_empty_flags(std::span<const CaptionSpan> spans,
                                              std::size_t num_segments, double segment_length);

}  // namespace repurpose::data
