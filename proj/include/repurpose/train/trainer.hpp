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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repurpose/core/video.hpp"
#include "repurpose/eval/metrics.hpp"
#include "repurpose/losses/losses.hpp"
#include "repurpose/model/network.hpp"
#include "repurpose/train/config.hpp"
#include "repurpose/train/optimizer.hpp"

namespace repurpose::train {

struct StepRecord {
  std::size_t step = 0;  // 1-based
  std::size_t epoch = 0;
  double lr = 0.0;
  double grad_norm = 0.0;  // before clipping
  losses::LossBreakdown loss;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;        // rate of the epoch's last step
  losses::LossBreakdown mean_loss;
  eval::EvalReport val;
};

struct TrainHooks {
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const EpochRecord&)> on_epoch;
  /// Called with the network whenever validation improves.
  std::function<void(const model::Network&, const EpochRecord&)> on_best;
};

struct TrainResult {
  model::Network final_model;
  model::Network best_model;
  std::size_t best_epoch = 0;
  eval::EvalReport initial_val;  // untrained network
  std::vector<EpochRecord> history;
  std::vector<StepRecord> steps;
};

/// Batches of up to batch_size videos. Videos are shuffled, sorted by
/// length inside pools of four batches, cut into batches, and the batch
/// order is shuffled again.
std::vector<std::vector<std::size_t>> make_batches(std::span<const VideoSample> videos, std::size_t batch_size,
                                                   std::mt19937_64& rng);

/// One optimisation objective over a batch: mean of per-video losses.
/// Accumulates gradients into the network parameters (which are not
/// zeroed first) and returns the mean breakdown. Throws kNonFiniteLoss.
losses::LossBreakdown accumulate_batch_gradients(model::Network& network,
                                                 std::span<const VideoSample* const> batch,
                                                 const losses::LossOptions& options,
                                                 const model::ForwardContext& ctx, const std::string& batch_id);

/// Mean loss over a batch without gradients and without dropout.
losses::LossBreakdown batch_loss(model::Network& network, std::span<const VideoSample* const> batch,
                                 const losses::LossOptions& options);

class Trainer {
 public:
  Trainer(TrainConfig config, std::span<const VideoSample> train_set, std::span<const VideoSample> val_set);

  /// Runs every epoch; evaluates on the validation set after each one and
  /// keeps the best network by average mAP.
  TrainResult run(const TrainHooks& hooks = {});

  /// A single update of network() on the given batch at the given
  /// learning rate. Returns the batch's loss before the update.
  StepRecord step(std::span<const VideoSample* const> batch, double lr, const std::string& batch_id = "manual");

  model::Network& network() noexcept { return network_; }
  const TrainConfig& config() const noexcept { return config_; }

 private:
  TrainConfig config_;
  std::span<const VideoSample> train_;
  std::span<const VideoSample> val_;
  model::Network network_;
  Adam adam_;
  std::mt19937_64 rng_;
};

eval::EvalReport evaluate_network(model::Network& network, std::span<const VideoSample> videos,
                                  const eval::EvalOptions& options = {});

/// SHA-256 over every parameter's name, shape and values.
std::string parameter_checksum(const model::Network& network);

}  // namespace repurpose::train
