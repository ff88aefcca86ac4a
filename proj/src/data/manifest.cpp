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

#include "repurpose/data/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"
#include "repurpose/core/labels.hpp"
#include "repurpose/data/captions.hpp"
#include "repurpose/data/feature_store.hpp"
#include "repurpose/error.hpp"

namespace repurpose::data {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  raise(Errc::kSchemaError, "unknown split '" + std::string(name) + "'");
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto rel = [&](const fs::path& p) {
    return p.is_absolute() ? fs::relative(p, fs::absolute(base)).generic_string()
                           : fs::path(p).generic_string();
  };
  ordered_json j;
  j["split"] = std::string(split_name(manifest.split));
  j["entries"] = ordered_json::array();
  for (const auto& e : manifest.entries) {
    j["entries"].push_back({{"video_id", e.video_id},
                            {"duration", e.duration},
                            {"feature_path", rel(e.feature_path)},
                            {"annotation_path", rel(e.annotation_path)}});
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) raise(Errc::kIoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::kIoError, "manifest not found: " + path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  DatasetManifest m;
  try {
    const auto j = ordered_json::parse(in);
    m.split = parse_split(j.at("split").get<std::string>());
    std::set<std::string> seen;
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.video_id = e.at("video_id").get<std::string>();
      entry.duration = e.at("duration").get<double>();
      entry.feature_path = base / e.at("feature_path").get<std::string>();
      entry.annotation_path = base / e.at("annotation_path").get<std::string>();
      if (!seen.insert(entry.video_id).second) {
        raise(Errc::kSchemaError, "duplicate video_id '" + entry.video_id + "' in " + path.string());
      }
      m.entries.push_back(std::move(entry));
    }
  } catch (const ordered_json::exception& e) {
    raise(Errc::kSchemaError, path.string() + ": " + e.what());
  }
  return m;
}

VideoSample load_video(const ManifestEntry& entry, const LoadOptions& options) {
  if (!fs::exists(entry.annotation_path)) {
    raise(Errc::kIoError, "annotation not found: " + entry.annotation_path.string());
  }
  if (!fs::is_directory(entry.feature_path)) {
    raise(Errc::kCorruptContainer, "feature container not found: " + entry.feature_path.string());
  }
  const Annotation ann = read_annotation(entry.annotation_path);
  if (ann.video_id != entry.video_id) {
    raise(Errc::kSchemaError, "annotation " + entry.annotation_path.string() + " describes '" +
                                  ann.video_id + "', manifest expects '" + entry.video_id + "'");
  }

  VideoSample s;
  s.video_id = ann.video_id;
  s.duration = ann.duration;
  s.segment_length = options.segment_length;
  const std::size_t expected = segment_count(s.duration, s.segment_length);

  auto fetch = [&](Modality m) {
    Matrix values = read_feature_array(entry.feature_path, m);
    if (values.rows() == expected) return values;
    const std::string what = s.video_id + ": " + std::string(modality_name(m)) + " has " +
                             std::to_string(values.rows()) + " rows, expected " +
                             std::to_string(expected);
    if (options.strict || values.rows() < expected) raise(Errc::kShapeMismatch, what);
    s.warnings.push_back(what + "; truncated");
    return values.slice_rows(0, expected);
  };
  s.visual = fetch(Modality::kVisual);
  s.audio = fetch(Modality::kAudio);
  s.caption = fetch(Modality::kCaption);

  s.clips = sorted_disjoint_clips(ann.clips, s.duration);
  for (const auto& c : ann.captions) {
    s.caption_spans.push_back({c.interval, c.text, {}});
  }
  s.caption_empty = caption_empty_flags(s.caption_spans, expected, s.segment_length);
  s.validate();
  return s;
}

std::vector<VideoSample> load_manifest(const DatasetManifest& manifest, const LoadOptions& options) {
  std::vector<VideoSample> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) out.push_back(load_video(e, options));
  return out;
}

ManifestEntry save_video(const VideoSample& sample, const fs::path& feature_dir,
                         const fs::path& annotation_path) {
  write_feature_array(feature_dir, Modality::kVisual, sample.visual);
  write_feature_array(feature_dir, Modality::kAudio, sample.audio);
  write_feature_array(feature_dir, Modality::kCaption, sample.caption);
  write_annotation(annotation_path, annotation_of(sample));
  return {sample.video_id, sample.duration, feature_dir, annotation_path};
}

std::array<DatasetManifest, 3> split_manifest(const std::vector<ManifestEntry>& entries,
                                              std::array<unsigned, 3> ratios, std::uint64_t seed) {
  const std::size_t n = entries.size();
  if (n < 3) raise(Errc::kTooFewEntries, "need at least 3 entries to split, got " + std::to_string(n));
  const unsigned total = ratios[0] + ratios[1] + ratios[2];
  if (total == 0) raise(Errc::kInvalidArgument, "split ratios sum to zero");

  auto share = [&](unsigned r) {
    return std::max<std::size_t>(1, (n * r) / total);
  };
  const std::size_t n_val = share(ratios[1]);
  const std::size_t n_test = share(ratios[2]);
  if (n_val + n_test >= n) raise(Errc::kTooFewEntries, "split leaves no training entries");

  // Fisher-Yates with explicit bounded draws.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }

  std::array<DatasetManifest, 3> out{DatasetManifest{Split::kTrain, {}},
                                     DatasetManifest{Split::kVal, {}},
                                     DatasetManifest{Split::kTest, {}}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bucket = i < n_val ? 1 : (i < n_val + n_test ? 2 : 0);
    out[bucket].entries.push_back(entries[order[i]]);
  }
  return out;
}

}  // namespace repurpose::data
