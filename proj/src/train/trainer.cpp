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

#include "repurpose/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "repurpose/core/hash.hpp"
#include "repurpose/core/labels.hpp"
#include "repurpose/error.hpp"

namespace repurpose::train {

namespace {

void add_scaled(losses::LossBreakdown& acc, const losses::LossBreakdown& b, double w) {
  acc.total += w * b.total;
  acc.uni_focal += w * b.uni_focal;
  acc.mul_focal += w * b.mul_focal;
  acc.kl += w * b.kl;
  acc.iou += w * b.iou;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

Matrix column_seed(const std::vector<double>& grad, std::size_t rows, double scale) {
  Matrix m(rows, 1);
  for (std::size_t t = 0; t < grad.size(); ++t) m(t, 0) = static_cast<float>(scale * grad[t]);
  return m;
}

bool finite(const losses::LossBreakdown& b) {
  return std::isfinite(b.total) && std::isfinite(b.uni_focal) && std::isfinite(b.mul_focal) &&
         std::isfinite(b.kl) && std::isfinite(b.iou);
}

std::string batch_videos(std::span<const VideoSample* const> batch) {
  std::string ids;
  for (const VideoSample* s : batch) ids += (ids.empty() ? "" : ",") + s->video_id;
  return ids;
}

}  // namespace

std::vector<std::vector<std::size_t>> make_batches(std::span<const VideoSample> videos, std::size_t batch_size,
                                                   std::mt19937_64& rng) {
  std::vector<std::size_t> order(videos.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t pool = 4 * batch_size;
  for (std::size_t i = 0; i < order.size(); i += pool) {
    const auto end = order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + pool));
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(i), end, [&](std::size_t a, std::size_t b) {
      return videos[a].num_segments() < videos[b].num_segments();
    });
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

losses::LossBreakdown accumulate_batch_gradients(model::Network& network, std::span<const VideoSample* const> batch,
                                                 const losses::LossOptions& options,
                                                 const model::ForwardContext& ctx, const std::string& batch_id) {
  const model::Batch collated = model::collate(batch);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  losses::LossBreakdown mean;
  for (const auto& item : collated.items) {
    const VideoSample& s = *item.sample;
    autograd::Tape tape(true);
    model::HeadVars vars;
    const model::HeadOutputs heads = network.run(tape, item, ctx, &vars);
    const SegmentLabels labels = clips_to_labels(s.clips, s.duration, s.segment_length);
    const losses::LossGradients g = losses::total_loss_with_grad(heads, labels, s.segment_length, options);
    if (!finite(g.breakdown)) {
      raise(Errc::kNonFiniteLoss, "non-finite loss in batch " + batch_id + " (video " + s.video_id + ")");
    }
    add_scaled(mean, g.breakdown, inv_b);

    const std::size_t rows = collated.padded_length;
    std::vector<std::pair<autograd::Var, Matrix>> seeds;
    if (!all_zero(g.logit_fused)) seeds.emplace_back(vars.logit_fused, column_seed(g.logit_fused, rows, inv_b));
    if (vars.branch_heads) {
      if (!all_zero(g.logit_visual)) seeds.emplace_back(vars.logit_visual, column_seed(g.logit_visual, rows, inv_b));
      if (!all_zero(g.logit_audio)) seeds.emplace_back(vars.logit_audio, column_seed(g.logit_audio, rows, inv_b));
    }
    if (!all_zero(g.raw_start) || !all_zero(g.raw_end)) {
      Matrix reg(rows, 2);
      for (std::size_t t = 0; t < g.raw_start.size(); ++t) {
        reg(t, 0) = static_cast<float>(inv_b * g.raw_start[t]);
        reg(t, 1) = static_cast<float>(inv_b * g.raw_end[t]);
      }
      seeds.emplace_back(vars.regression, std::move(reg));
    }
    tape.backward(seeds);
  }
  return mean;
}

losses::LossBreakdown batch_loss(model::Network& network, std::span<const VideoSample* const> batch,
                                 const losses::LossOptions& options) {
  const model::Batch collated = model::collate(batch);
  losses::LossBreakdown mean;
  for (const auto& item : collated.items) {
    const VideoSample& s = *item.sample;
    autograd::Tape tape(false);
    const model::HeadOutputs heads = network.run(tape, item, model::ForwardContext{});
    const SegmentLabels labels = clips_to_labels(s.clips, s.duration, s.segment_length);
    add_scaled(mean, losses::total_loss_with_grad(heads, labels, s.segment_length, options).breakdown,
               1.0 / static_cast<double>(batch.size()));
  }
  return mean;
}

eval::EvalReport evaluate_network(model::Network& network, std::span<const VideoSample> videos,
                                  const eval::EvalOptions& options) {
  return eval::evaluate([&](const VideoSample& s) { return network.predict(s); }, videos, options).report;
}

std::string parameter_checksum(const model::Network& network) {
  Sha256 h;
  for (const auto& p : network.parameters()) {
    h.update(p.name);
    const std::uint64_t shape[2] = {p.value.rows(), p.value.cols()};
    h.update(std::as_bytes(std::span(shape)));
    h.update(std::as_bytes(p.value.values()));
  }
  return h.hex_digest();
}

Trainer::Trainer(TrainConfig config, std::span<const VideoSample> train_set, std::span<const VideoSample> val_set)
    : config_(std::move(config)),
      train_(train_set),
      val_(val_set),
      network_((config_.validate(), config_.resolved_model()), config_.seed),
      rng_(config_.seed ^ 0x5851f42d4c957f2dULL) {
  if (train_.empty()) raise(Errc::kInvalidConfig, "training set is empty");
  const auto dims = train_.front().dims();
  const auto& want = config_.model.input_dims;
  if (dims != want) {
    raise(Errc::kConfigMismatch, "feature dims in data (" + std::to_string(dims.visual) + "/" +
                                     std::to_string(dims.audio) + "/" + std::to_string(dims.caption) +
                                     ") differ from model input dims (" + std::to_string(want.visual) + "/" +
                                     std::to_string(want.audio) + "/" + std::to_string(want.caption) + ")");
  }
}

StepRecord Trainer::step(std::span<const VideoSample* const> batch, double lr, const std::string& batch_id) {
  network_.zero_grad();
  const model::ForwardContext ctx{true, &rng_};
  StepRecord rec;
  rec.lr = lr;
  rec.loss = accumulate_batch_gradients(network_, batch, config_.resolved_losses(), ctx, batch_id);
  rec.grad_norm = clip_grad_norm(network_.parameters(), config_.grad_clip_norm);
  if (!std::isfinite(rec.grad_norm)) {
    raise(Errc::kNonFiniteLoss, "non-finite gradient in batch " + batch_id + " (videos " + batch_videos(batch) + ")");
  }
  adam_.step(network_.parameters(), lr);
  return rec;
}

TrainResult Trainer::run(const TrainHooks& hooks) {
  const std::size_t per_epoch = (train_.size() + config_.batch_size - 1) / config_.batch_size;
  const std::size_t total = per_epoch * config_.epochs;
  const std::size_t warmup = per_epoch * config_.warmup_epochs;

  TrainResult result{network_, network_, 0, {}, {}, {}};
  result.initial_val = evaluate_network(network_, val_, config_.eval);
  double best = -1.0;
  std::size_t step_index = 0;
  for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
    EpochRecord er;
    er.epoch = epoch;
    const auto batches = make_batches(train_, config_.batch_size, rng_);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<const VideoSample*> members;
      for (std::size_t i : batches[b]) members.push_back(&train_[i]);
      const double lr = lr_at(step_index, total, warmup, config_.learning_rate);
      const std::string id = "epoch " + std::to_string(epoch) + " batch " + std::to_string(b) + " [" +
                             batch_videos(members) + "]";
      StepRecord rec = step(members, lr, id);
      rec.step = ++step_index;
      rec.epoch = epoch;
      add_scaled(er.mean_loss, rec.loss, 1.0 / static_cast<double>(batches.size()));
      er.lr = lr;
      if (hooks.on_step) hooks.on_step(rec);
      result.steps.push_back(rec);
    }
    er.val = evaluate_network(network_, val_, config_.eval);
    if (er.val.average > best) {
      best = er.val.average;
      result.best_epoch = epoch;
      result.best_model = network_;
      if (hooks.on_best) hooks.on_best(network_, er);
    }
    if (hooks.on_epoch) hooks.on_epoch(er);
    result.history.push_back(std::move(er));
  }
  result.final_model = network_;
  return result;
}

}  // namespace repurpose::train
