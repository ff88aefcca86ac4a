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

#include "repurpose/data/feature_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "repurpose/error.hpp"

namespace repurpose::data {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

// The container is little-endian; swap in place on big-endian hosts.
void to_little_endian(std::vector<float>& values) {
  if constexpr (std::endian::native == std::endian::big) {
    for (float& f : values) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      u = byteswap32(u);
      std::memcpy(&f, &u, 4);
    }
  }
}

ordered_json read_json_file(const fs::path& path, Errc code) {
  std::ifstream in(path);
  if (!in) raise(code, "cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const ordered_json::exception& e) {
    raise(code, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) raise(Errc::kIoError, "short write to " + path.string());
}

}  // namespace

std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::kVisual: return "visual";
    case Modality::kAudio: return "audio";
    case Modality::kCaption: return "caption";
  }
  return "unknown";
}

void write_feature_array(const fs::path& dir, Modality m, const Matrix& values) {
  fs::create_directories(dir);
  const std::string name(modality_name(m));
  ordered_json sidecar;
  sidecar["rows"] = values.rows();
  sidecar["cols"] = values.cols();
  sidecar["dtype"] = "float32";
  sidecar["modality"] = name;
  write_text(dir / (name + ".json"), sidecar.dump(2) + "\n");

  std::vector<float> raw(values.values().begin(), values.values().end());
  to_little_endian(raw);
  std::ofstream out(dir / (name + ".f32"), std::ios::binary);
  if (!out) raise(Errc::kIoError, "cannot write " + (dir / (name + ".f32")).string());
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!out) raise(Errc::kIoError, "short write to " + (dir / (name + ".f32")).string());
}

Matrix read_feature_array(const fs::path& dir, Modality m) {
  const std::string name(modality_name(m));
  const auto sidecar = read_json_file(dir / (name + ".json"), Errc::kCorruptContainer);
  std::size_t rows = 0;
  std::size_t cols = 0;
  try {
    rows = sidecar.at("rows").get<std::size_t>();
    cols = sidecar.at("cols").get<std::size_t>();
    if (sidecar.at("dtype").get<std::string>() != "float32") {
      raise(Errc::kCorruptContainer, name + ": unsupported dtype");
    }
    if (sidecar.at("modality").get<std::string>() != name) {
      raise(Errc::kCorruptContainer, name + ": sidecar names a different modality");
    }
  } catch (const ordered_json::exception& e) {
    raise(Errc::kCorruptContainer, (dir / (name + ".json")).string() + ": " + e.what());
  }

  const fs::path blob = dir / (name + ".f32");
  std::error_code ec;
  const auto bytes = fs::file_size(blob, ec);
  if (ec) raise(Errc::kCorruptContainer, "cannot stat " + blob.string());
  if (bytes != rows * cols * sizeof(float)) {
    raise(Errc::kCorruptContainer, blob.string() + " holds " + std::to_string(bytes) +
                                       " bytes, sidecar declares " + std::to_string(rows) + " x " +
                                       std::to_string(cols) + " float32");
  }
  std::vector<float> raw(rows * cols);
  std::ifstream in(blob, std::ios::binary);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  if (!in) raise(Errc::kCorruptContainer, "short read from " + blob.string());
  to_little_endian(raw);
  return Matrix(rows, cols, std::move(raw));
}

void write_annotation(const fs::path& path, const Annotation& a) {
  ordered_json j;
  j["video_id"] = a.video_id;
  j["duration"] = a.duration;
  j["clips"] = ordered_json::array();
  for (const auto& c : a.clips) j["clips"].push_back({{"start", c.start()}, {"end", c.end()}});
  j["captions"] = ordered_json::array();
  for (const auto& c : a.captions) {
    j["captions"].push_back(
        {{"start", c.interval.start()}, {"end", c.interval.end()}, {"text", c.text}});
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, j.dump(2) + "\n");
}

Annotation read_annotation(const fs::path& path) {
  const auto j = read_json_file(path, Errc::kSchemaError);
  Annotation a;
  try {
    a.video_id = j.at("video_id").get<std::string>();
    a.duration = j.at("duration").get<double>();
    for (const auto& c : j.at("clips")) {
      a.clips.emplace_back(c.at("start").get<double>(), c.at("end").get<double>());
    }
    if (j.contains("captions")) {
      for (const auto& c : j.at("captions")) {
        a.captions.push_back({Interval(c.at("start").get<double>(), c.at("end").get<double>()),
                              c.at("text").get<std::string>()});
      }
    }
  } catch (const ordered_json::exception& e) {
    raise(Errc::kSchemaError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    raise(Errc::kSchemaError, path.string() + ": " + e.what());
  }
  if (!(a.duration > 0.0)) raise(Errc::kSchemaError, path.string() + ": duration must be positive");
  return a;
}

Annotation annotation_of(const VideoSample& sample) {
  Annotation a{sample.video_id, sample.duration, sample.clips, {}};
  for (const auto& span : sample.caption_spans) a.captions.push_back({span.interval, span.text});
  return a;
}

}  // namespace repurpose::data
