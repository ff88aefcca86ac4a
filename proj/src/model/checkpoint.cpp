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

#include "repurpose/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "repurpose/error.hpp"
#include "repurpose/model/network.hpp"

namespace repurpose::model {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void swap_if_big(char* bytes, std::size_t count, std::size_t width) {
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < count; ++i) {
      char* p = bytes + i * width;
      for (std::size_t j = 0; j < width / 2; ++j) std::swap(p[j], p[width - 1 - j]);
    }
  } else {
    (void)bytes;
    (void)count;
    (void)width;
  }
}

}  // namespace

void write_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  ordered_json header;
  header["format"] = kCheckpointFormat;
  header["kind"] = ckpt.kind;
  header["model"] = to_json(ckpt.model);
  ordered_json params = ordered_json::array();
  for (const auto& p : ckpt.parameters) {
    params.push_back({{"name", p.name}, {"shape", {p.value.rows(), p.value.cols()}}});
  }
  header["parameters"] = std::move(params);
  header["metadata"] = ckpt.metadata;
  const std::string text = header.dump();

  fs::path tmp = path;
  tmp += ".tmp";
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kCheckpointWriteError, "cannot open " + tmp.string());
    out << kCheckpointFormat << '\n';
    std::uint64_t len = text.size();
    char len_bytes[8];
    std::memcpy(len_bytes, &len, 8);
    swap_if_big(len_bytes, 1, 8);
    out.write(len_bytes, 8);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& p : ckpt.parameters) {
      std::vector<float> raw(p.value.values().begin(), p.value.values().end());
      swap_if_big(reinterpret_cast<char*>(raw.data()), raw.size(), 4);
      out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
    }
    out.close();
    if (!out) raise(Errc::kCheckpointWriteError, "write failed for " + tmp.string());
    fs::rename(tmp, path);
  } catch (const fs::filesystem_error& e) {
    raise(Errc::kCheckpointWriteError, e.what());
  }
}

Checkpoint read_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::kIoError, "cannot open checkpoint " + path.string());
  std::string tag;
  std::getline(in, tag);
  if (tag != kCheckpointFormat) {
    raise(Errc::kCorruptContainer, path.string() + ": unknown checkpoint format '" + tag + "'");
  }
  char len_bytes[8];
  if (!in.read(len_bytes, 8)) raise(Errc::kCorruptContainer, path.string() + ": truncated header length");
  swap_if_big(len_bytes, 1, 8);
  std::uint64_t len = 0;
  std::memcpy(&len, len_bytes, 8);
  if (len > (1ull << 30)) raise(Errc::kCorruptContainer, path.string() + ": implausible header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    raise(Errc::kCorruptContainer, path.string() + ": truncated header");
  }

  Checkpoint ckpt;
  try {
    const ordered_json header = ordered_json::parse(text);
    ckpt.kind = header.at("kind").get<std::string>();
    ckpt.model = model_config_from_json(header.at("model"));
    ckpt.metadata = header.value("metadata", ordered_json::object());
    for (const auto& entry : header.at("parameters")) {
      const auto& shape = entry.at("shape");
      Matrix value(shape.at(0).get<std::size_t>(), shape.at(1).get<std::size_t>());
      ckpt.parameters.push_back({entry.at("name").get<std::string>(), std::move(value), {}});
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::kCorruptContainer, path.string() + ": bad header: " + e.what());
  }
  for (auto& p : ckpt.parameters) {
    auto values = p.value.values();
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 4))) {
      raise(Errc::kCorruptContainer, path.string() + ": truncated payload at " + p.name);
    }
    swap_if_big(reinterpret_cast<char*>(values.data()), values.size(), 4);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    raise(Errc::kCorruptContainer, path.string() + ": trailing bytes after payload");
  }
  return ckpt;
}

Checkpoint snapshot(const Network& network, ordered_json metadata) {
  Checkpoint ckpt;
  ckpt.model = network.config();
  ckpt.metadata = std::move(metadata);
  for (const auto& p : network.parameters()) ckpt.parameters.push_back({p.name, p.value, {}});
  return ckpt;
}

void restore(Network& network, const Checkpoint& ckpt) {
  if (ckpt.kind != "network") raise(Errc::kConfigMismatch, "checkpoint kind '" + ckpt.kind + "' has no weights");
  auto& params = network.parameters();
  if (params.size() != ckpt.parameters.size()) {
    raise(Errc::kConfigMismatch, "checkpoint has " + std::to_string(ckpt.parameters.size()) +
                                     " parameters, network has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& src = ckpt.parameters[i];
    if (src.name != params[i].name || !src.value.same_shape(params[i].value)) {
      raise(Errc::kConfigMismatch, "parameter " + std::to_string(i) + ": checkpoint '" + src.name + "' [" +
                                       std::to_string(src.value.rows()) + "x" + std::to_string(src.value.cols()) +
                                       "] vs network '" + params[i].name + "' [" +
                                       std::to_string(params[i].value.rows()) + "x" +
                                       std::to_string(params[i].value.cols()) + "]");
    }
    params[i].value = src.value;
  }
}

Network instantiate(const Checkpoint& ckpt) {
  Network network(ckpt.model, 0);
  restore(network, ckpt);
  return network;
}

void require_compatible(const ModelConfig& model, const FeatureDims& data) {
  auto check = [](bool used, const char* name, std::size_t expected, std::size_t actual) {
    if (used && expected != actual) {
      raise(Errc::kConfigMismatch, std::string(name) + " feature dimension: checkpoint expects " +
                                       std::to_string(expected) + ", data has " + std::to_string(actual));
    }
  };
  check(model.modalities.visual, "visual", model.input_dims.visual, data.visual);
  check(model.modalities.audio, "audio", model.input_dims.audio, data.audio);
  check(model.modalities.caption, "caption", model.input_dims.caption, data.caption);
}

}  // namespace repurpose::model
