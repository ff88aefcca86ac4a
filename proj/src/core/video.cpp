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

#include "repurpose/core/video.hpp"

#include "repurpose/core/labels.hpp"
#include "repurpose/error.hpp"

namespace repurpose {

void VideoSample::validate() const {
  const std::size_t expected = segment_count(duration, segment_length);
  if (visual.rows() != expected || audio.rows() != expected || caption.rows() != expected) {
    raise(Errc::kShapeMismatch,
          video_id + ": feature rows (" + std::to_string(visual.rows()) + ", " +
              std::to_string(audio.rows()) + ", " + std::to_string(caption.rows()) +
              ") do not match " + std::to_string(expected) + " segments");
  }
  if (caption_empty.size() != expected) {
    raise(Errc::kShapeMismatch, video_id + ": caption empty-flag length mismatch");
  }
  for (const auto& c : clips) {
    if (c.end() > duration) {
      raise(Errc::kClipOutOfRange, video_id + ": clip ends past the video duration");
    }
  }
}

}  // namespace repurpose
