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

#include "repurpose/model/config.hpp"

#include <cctype>

#include "repurpose/error.hpp"

namespace repurpose::model {

std::string ModalitySet::to_string() const {
  std::string out;
  auto append = [&](bool on, const char* tag) {
    if (!on) return;
    if (!out.empty()) out += "&";
    out += tag;
  };
  append(audio, "A");
  append(visual, "V");
  append(caption, "C");
  return out;
}

ModalitySet ModalitySet::parse(std::string_view text) {
  ModalitySet m{false, false, false};
  for (char ch : text) {
    switch (std::toupper(static_cast<unsigned char>(ch))) {
      case 'A': m.audio = true; break;
      case 'V': m.visual = true; break;
      case 'C': m.caption = true; break;
      case '&': case ',': case '+': case ' ': break;
      default: raise(Errc::kInvalidConfig, "unknown modality in '" + std::string(text) + "'");
    }
  }
  if (m.empty()) raise(Errc::kInvalidConfig, "modality set is empty");
  return m;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { raise(Errc::kInvalidConfig, what); };
  if (d_model == 0 || n_heads == 0 || d_model % n_heads != 0) fail("d_model must be a positive multiple of n_heads");
  if (n_self_layers == 0 || n_caption_layers == 0 || n_fusion_layers == 0) fail("layer counts must be at least 1");
  if (dropout < 0.0f || dropout >= 1.0f) fail("dropout must be in [0, 1)");
  if (head_hidden == 0 || ffn_multiplier == 0) fail("hidden widths must be positive");
  if (input_dims.visual == 0 || input_dims.audio == 0 || input_dims.caption == 0) fail("input dims must be positive");
  if (!(regression_scale > 0.0)) fail("regression_scale must be positive");
  if (modalities.empty()) fail("at least one modality is required");
}

nlohmann::ordered_json to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["d_model"] = c.d_model;
  j["n_self_layers"] = c.n_self_layers;
  j["n_caption_layers"] = c.n_caption_layers;
  j["n_fusion_layers"] = c.n_fusion_layers;
  j["n_heads"] = c.n_heads;
  j["dropout"] = c.dropout;
  j["input_dims"] = {{"visual", c.input_dims.visual},
                     {"audio", c.input_dims.audio},
                     {"caption", c.input_dims.caption}};
  j["head_hidden"] = c.head_hidden;
  j["ffn_multiplier"] = c.ffn_multiplier;
  j["positional_encoding"] = c.positional_encoding;
  j["regression_scale"] = c.regression_scale;
  j["modalities"] = c.modalities.to_string();
  return j;
}

ModelConfig model_config_from_json(const nlohmann::ordered_json& j) {
  ModelConfig c;
  try {
    c.d_model = j.value("d_model", c.d_model);
    c.n_self_layers = j.value("n_self_layers", c.n_self_layers);
    c.n_caption_layers = j.value("n_caption_layers", c.n_caption_layers);
    c.n_fusion_layers = j.value("n_fusion_layers", c.n_fusion_layers);
    c.n_heads = j.value("n_heads", c.n_heads);
    c.dropout = j.value("dropout", c.dropout);
    if (j.contains("input_dims")) {
      const auto& d = j.at("input_dims");
      c.input_dims.visual = d.value("visual", c.input_dims.visual);
      c.input_dims.audio = d.value("audio", c.input_dims.audio);
      c.input_dims.caption = d.value("caption", c.input_dims.caption);
    }
    c.head_hidden = j.value("head_hidden", c.head_hidden);
    c.ffn_multiplier = j.value("ffn_multiplier", c.ffn_multiplier);
    c.positional_encoding = j.value("positional_encoding", c.positional_encoding);
    c.regression_scale = j.value("regression_scale", c.regression_scale);
    if (j.contains("modalities")) c.modalities = ModalitySet::parse(j.at("modalities").get<std::string>());
  } catch (const nlohmann::ordered_json::exception& e) {
    raise(Errc::kInvalidConfig, std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace repurpose::model
