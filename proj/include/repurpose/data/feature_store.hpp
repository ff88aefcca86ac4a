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

#include "repurpose/core/interval.hpp"
#include "repurpose/core/video.hpp"
#include "repurpose/tensor/matrix.hpp"

namespace repurpose::data {

/// Per-video feature container: a directory holding `<modality>.f32`
/// (little-endian float32, row-major) and a `<modality>.json` sidecar
/// {"rows", "cols", "dtype", "modality"} for each of the three modalities.
std::string_view modality_name(Modality m);

void write_feature_array(const std::filesystem::path& dir, Modality m, const Matrix& values);
Matrix read_feature_array(const std::filesystem::path& dir, Modality m);

struct CaptionText {
  Interval interval;
  std::string text;
};

/// Ground truth and transcript for one video, stored as JSON.
struct Annotation {
  std::string video_id;
  double duration = 0.0;
  std::vector<Interval> clips;
  std::vector<CaptionText> captions;
};

void write_annotation(const std::filesystem::path& path, const Annotation& annotation);
Annotation read_annotation(const std::filesystem::path& path);

Annotation annotation_of(const VideoSample& sample);

}  // namespace repurpose::data
