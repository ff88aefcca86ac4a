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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "repurpose/eval/metrics.hpp"
#include "repurpose/losses/losses.hpp"
#include "repurpose/model/config.hpp"

namespace repurpose::train {

struct Ablation {
  model::ModalitySet modalities{};
  bool uni_focal_on = true;
  bool alignment_on = true;

  bool operator==(const Ablation&) const = default;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t epochs = 100;
  std::size_t warmup_epochs = 5;
  std::size_t batch_size = 4;
  std::uint64_t seed = 0;
  double grad_clip_norm = 1.0;
  losses::LossWeights weights{};
  losses::FocalParams focal{};
  bool detach_fused_target = false;
  model::ModelConfig model{};
  Ablation ablation{};
  eval::EvalOptions eval{};

  /// Throws kInvalidConfig.
  void validate() const;

  /// Model config with the ablation's modality set applied.
  model::ModelConfig resolved_model() const;
  /// Loss weights with λ1 / λ3 zeroed when the ablation turns them off.
  losses::LossOptions resolved_losses() const;

  bool operator==(const TrainConfig&) const = default;
};

nlohmann::ordered_json to_json(const TrainConfig& config);
/// Missing keys keep their defaults. The loss weights accept "λ1".."λ4"
/// as aliases of "lambda1".."lambda4".
TrainConfig train_config_from_json(const nlohmann::ordered_json& j);

/// Applies "a.b.c=value" to a config document. The value is parsed as
/// JSON when possible and taken as a string otherwise. The key path must
/// already exist. Throws kInvalidConfig.
void apply_override(nlohmann::ordered_json& document, std::string_view assignment);

/// Linear warm-up to base_lr over warmup_steps, then cosine decay to 0 at
/// total_steps. Throws kInvalidSchedule.
double lr_at(std::size_t step, std::size_t total_steps, std::size_t warmup_steps, double base_lr);

}  // namespace repurpose::train
