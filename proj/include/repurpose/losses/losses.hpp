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
#include <vector>

#include "repurpose/core/labels.hpp"
#include "repurpose/model/output.hpp"

namespace repurpose::losses {

struct LossWeights {
  double uni_focal = 0.1;  // λ1
  double mul_focal = 0.3;  // λ2
  double alignment = 0.1;  // λ3
  double iou = 0.7;        // λ4

  /// Throws kInvalidConfig on negative or non-finite weights.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct FocalParams {
  double gamma = 2.0;
  double alpha = 0.25;
  double epsilon = 1e-7;

  void validate() const;
  bool operator==(const FocalParams&) const = default;
};

/// Mean binary focal loss over segments. Probabilities are clamped to
/// [ε, 1 - ε].
double focal_loss(std::span<const double> probs, std::span<const std::uint8_t> targets,
                  const FocalParams& params);

/// Focal loss of the visual and the audio branch, summed.
double uni_focal(const model::ModelOutput& output, const SegmentLabels& labels,
                 const FocalParams& params);

/// Mean Bernoulli KL(branch || fused) over segments.
double kl_alignment(std::span<const double> branch_probs, std::span<const double> fused_probs,
                    double epsilon);

/// Width given to a predicted interval whose two offsets are both zero.
inline constexpr double kDegenerateWidth = 1e-4;

/// 1 - GIoU between [tau - ps, tau + pe] and [tau - gs, tau + ge].
double interval_iou_loss(double tau, double ps, double pe, double gs, double ge);

/// Mean 1 - GIoU over segments with valid regression targets; 0 when the
/// video has none. Offsets are in seconds.
double iou_regression_loss(std::span<const double> start_offset, std::span<const double> end_offset,
                           const SegmentLabels& labels, double segment_length);

struct LossBreakdown {
  double total = 0.0;
  double uni_focal = 0.0;
  double mul_focal = 0.0;
  double kl = 0.0;  // both directions, summed
  double iou = 0.0;
};

/// Weighted composite objective for one video. Uni-modal and alignment
/// terms are zero when the output has no branch heads.
LossBreakdown total_loss(const model::ModelOutput& output, const SegmentLabels& labels,
                         double segment_length, const LossWeights& weights,
                         const FocalParams& params);

// Value-and-gradient forms with respect to raw head outputs.

struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;
};

ValueGrad focal_loss_from_logits(std::span<const double> logits, std::span<const std::uint8_t> targets,
                                 const FocalParams& params);

struct KlValueGrad {
  double value = 0.0;
  std::vector<double> grad_branch;  // w.r.t. branch logits
  std::vector<double> grad_fused;   // w.r.t. fused logits; zero when detached
};

KlValueGrad kl_alignment_from_logits(std::span<const double> branch_logits,
                                     std::span<const double> fused_logits, double epsilon,
                                     bool detach_fused_target = false);

struct IouValueGrad {
  double value = 0.0;
  std::vector<double> grad_start;  // w.r.t. raw (pre-rectifier) start outputs
  std::vector<double> grad_end;
};

/// Offsets are scale * max(0, raw).
IouValueGrad iou_regression_from_raw(std::span<const double> raw_start, std::span<const double> raw_end,
                                     double scale, const SegmentLabels& labels, double segment_length);

struct LossGradients {
  LossBreakdown breakdown;
  std::vector<double> logit_visual;
  std::vector<double> logit_audio;
  std::vector<double> logit_fused;
  std::vector<double> raw_start;
  std::vector<double> raw_end;
};

struct LossOptions {
  LossWeights weights{};
  FocalParams focal{};
  bool detach_fused_target = false;
};

/// Composite loss and its gradient. Terms with zero weight contribute
/// exactly zero gradient.
LossGradients total_loss_with_grad(const model::HeadOutputs& heads, const SegmentLabels& labels,
                                   double segment_length, const LossOptions& options);

}  // namespace repurpose::losses
