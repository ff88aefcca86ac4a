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

#include "repurpose/train/config.hpp"

#include <cmath>
#include <numbers>

#include "repurpose/error.hpp"

namespace repurpose::train {

using nlohmann::ordered_json;

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { raise(Errc::kInvalidConfig, msg); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (epochs == 0) fail("epochs must be positive");
  if (warmup_epochs >= epochs) fail("warmup_epochs must be smaller than epochs");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(grad_clip_norm > 0.0)) fail("grad_clip_norm must be positive");
  if (ablation.modalities.empty()) fail("ablation.modalities must not be empty");
  weights.validate();
  focal.validate();
  resolved_model().validate();
}

model::ModelConfig TrainConfig::resolved_model() const {
  model::ModelConfig m = model;
  m.modalities = ablation.modalities;
  return m;
}

losses::LossOptions TrainConfig::resolved_losses() const {
  losses::LossOptions o{weights, focal, detach_fused_target};
  if (!ablation.uni_focal_on) o.weights.uni_focal = 0.0;
  if (!ablation.alignment_on) o.weights.alignment = 0.0;
  return o;
}

ordered_json to_json(const TrainConfig& c) {
  ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["warmup_epochs"] = c.warmup_epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["grad_clip_norm"] = c.grad_clip_norm;
  j["weights"] = {{"lambda1", c.weights.uni_focal},
                  {"lambda2", c.weights.mul_focal},
                  {"lambda3", c.weights.alignment},
                  {"lambda4", c.weights.iou}};
  j["focal"] = {{"gamma", c.focal.gamma}, {"alpha", c.focal.alpha}, {"epsilon", c.focal.epsilon}};
  j["detach_fused_target"] = c.detach_fused_target;
  j["model"] = model::to_json(c.model);
  j["model"].erase("modalities");
  j["ablation"] = {{"modalities", c.ablation.modalities.to_string()},
                   {"uni_focal_on", c.ablation.uni_focal_on},
                   {"alignment_on", c.ablation.alignment_on}};
  j["eval"] = {{"conf_threshold", c.eval.conf_threshold},
               {"nms_sigma", c.eval.nms.sigma},
               {"nms_score_floor", c.eval.nms.score_floor}};
  return j;
}

namespace {

std::string canonical_key(std::string_view key) {
  static constexpr std::string_view kLambda = "\xce\xbb";  // UTF-8 'λ'
  if (key.starts_with(kLambda)) return "lambda" + std::string(key.substr(kLambda.size()));
  return std::string(key);
}

double weight(const ordered_json& w, int index, double fallback) {
  const std::string plain = "lambda" + std::to_string(index);
  const std::string greek = "\xce\xbb" + std::to_string(index);
  if (w.contains(plain)) return w.at(plain).get<double>();
  if (w.contains(greek)) return w.at(greek).get<double>();
  return fallback;
}

}  // namespace

TrainConfig train_config_from_json(const ordered_json& j) {
  TrainConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.warmup_epochs = j.value("warmup_epochs", c.warmup_epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      c.weights.uni_focal = weight(w, 1, c.weights.uni_focal);
      c.weights.mul_focal = weight(w, 2, c.weights.mul_focal);
      c.weights.alignment = weight(w, 3, c.weights.alignment);
      c.weights.iou = weight(w, 4, c.weights.iou);
    }
    if (j.contains("focal")) {
      const auto& f = j.at("focal");
      c.focal.gamma = f.value("gamma", c.focal.gamma);
      c.focal.alpha = f.value("alpha", c.focal.alpha);
      c.focal.epsilon = f.value("epsilon", c.focal.epsilon);
    }
    c.detach_fused_target = j.value("detach_fused_target", c.detach_fused_target);
    if (j.contains("model")) c.model = model::model_config_from_json(j.at("model"));
    if (j.contains("ablation")) {
      const auto& a = j.at("ablation");
      if (a.contains("modalities")) c.ablation.modalities = model::ModalitySet::parse(a.at("modalities").get<std::string>());
      c.ablation.uni_focal_on = a.value("uni_focal_on", c.ablation.uni_focal_on);
      c.ablation.alignment_on = a.value("alignment_on", c.ablation.alignment_on);
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      c.eval.conf_threshold = e.value("conf_threshold", c.eval.conf_threshold);
      c.eval.nms.sigma = e.value("nms_sigma", c.eval.nms.sigma);
      c.eval.nms.score_floor = e.value("nms_score_floor", c.eval.nms.score_floor);
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::kInvalidConfig, std::string("malformed training config: ") + e.what());
  }
  c.model.modalities = c.ablation.modalities;
  return c;
}

void apply_override(ordered_json& document, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    raise(Errc::kInvalidConfig, "override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string_view path = assignment.substr(0, eq);
  const std::string text(assignment.substr(eq + 1));

  ordered_json* node = &document;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = canonical_key(path.substr(pos, dot == std::string_view::npos ? path.npos : dot - pos));
    if (!node->is_object() || !node->contains(key)) {
      raise(Errc::kInvalidConfig, "unknown config key '" + std::string(path) + "'");
    }
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  ordered_json value = ordered_json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  *node = std::move(value);
}

double lr_at(std::size_t step, std::size_t total_steps, std::size_t warmup_steps, double base_lr) {
  if (step > total_steps || warmup_steps >= total_steps) {
    raise(Errc::kInvalidSchedule, "lr_at: need step <= total_steps and warmup_steps < total_steps (step " +
                                      std::to_string(step) + ", total " + std::to_string(total_steps) +
                                      ", warm-up " + std::to_string(warmup_steps) + ")");
  }
  if (step < warmup_steps) {
    return base_lr * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
  }
  const double progress =
      static_cast<double>(step - warmup_steps) / static_cast<double>(total_steps - warmup_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace repurpose::train
