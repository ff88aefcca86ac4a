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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "repurpose/core/video.hpp"

namespace repurpose::data {

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

struct ManifestEntry {
  std::string video_id;
  double duration = 0.0;
  std::filesystem::path feature_path;
  std::filesystem::path annotation_path;
};

struct DatasetManifest {
  Split split = Split::kTrain;
  std::vector<ManifestEntry> entries;
};

/// Relative paths are stored relative to the manifest file and resolved
/// against its directory on read.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct LoadOptions {
  double segment_length = 1.0;
  /// Reject feature arrays whose row count differs from the segment count.
  /// When false, longer arrays are truncated and a warning is recorded.
  bool strict = true;
};

VideoSample load_video(const ManifestEntry& entry, const LoadOptions& options = {});
std::vector<VideoSample> load_manifest(const DatasetManifest& manifest,
                                       const LoadOptions& options = {});

/// Writes the sample's features under `feature_dir` and its annotation to
/// `annotation_path`; returns the matching manifest entry.
ManifestEntry save_video(const VideoSample& sample, const std::filesystem::path& feature_dir,
                         const std::filesystem::path& annotation_path);

/// Deterministic shuffled split. Validation and test get
/// max(1, floor(n * r / sum)) entries each; the remainder goes to train.
std::array<DatasetManifest, 3> split_manifest(const std::vector<ManifestEntry>& entries,
                                              std::array<unsigned, 3> ratios, std::uint64_t seed);

}  // namespace repurpose::data
