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

#include "repurpose/losses/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "repurpose/error.hpp"

namespace repurpose::losses {

using model::sigmoid;

void LossWeights::validate() const {
  for (double w : {uni_focal, mul_focal, alignment, iou}) {
    if (!std::isfinite(w) || w < 0.0) raise(Errc::kInvalidConfig, "loss weights must be finite and non-negative");
  }
}

void FocalParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) raise(Errc::kInvalidConfig, "focal gamma must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) raise(Errc::kInvalidConfig, "focal alpha must lie in [0, 1]");
  if (!(epsilon > 0.0 && epsilon < 0.5)) raise(Errc::kInvalidConfig, "focal epsilon must lie in (0, 0.5)");
}

namespace {

void require_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    raise(Errc::kLengthMismatch,
          std::string(what) + ": lengths " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

double clamp_prob(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

double focal_term(double p, bool positive, const FocalParams& fp) {
  if (positive) return -fp.alpha * std::pow(1.0 - p, fp.gamma) * std::log(p);
  return -(1.0 - fp.alpha) * std::pow(p, fp.gamma) * std::log(1.0 - p);
}

double bernoulli_kl(double p, double q) {
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

struct Giou {
  double value;
  double d_start;
  double d_end;
};

// GIoU of predicted [ps, pe] against target [gs, ge] and its partials in
// the predicted endpoints.
Giou giou_with_grad(double ps, double pe, double gs, double ge) {
  const double lo = std::max(ps, gs);
  const double hi = std::min(pe, ge);
  const bool overlapping = hi > lo;
  const double inter = overlapping ? hi - lo : 0.0;
  const double uni = (pe - ps) + (ge - gs) - inter;
  const double hull = std::max(pe, ge) - std::min(ps, gs);

  const double di_ds = overlapping && ps > gs ? -1.0 : 0.0;
  const double di_de = overlapping && pe < ge ? 1.0 : 0.0;
  const double du_ds = -1.0 - di_ds;
  const double du_de = 1.0 - di_de;
  const double dh_ds = ps < gs ? -1.0 : 0.0;
  const double dh_de = pe > ge ? 1.0 : 0.0;

  auto partial = [&](double di, double du, double dh) {
    return (di * uni - inter * du) / (uni * uni) + (du * hull - uni * dh) / (hull * hull);
  };
  return {inter / uni - (hull - uni) / hull, partial(di_ds, du_ds, dh_ds), partial(di_de, du_de, dh_de)};
}

// Predicted interval relative to the segment center.
std::pair<double, double> predicted_relative(double start_offset, double end_offset) {
  if (start_offset == 0.0 && end_offset == 0.0) return {-0.5 * kDegenerateWidth, 0.5 * kDegenerateWidth};
  return {-start_offset, end_offset};
}

}  // namespace

double focal_loss(std::span<const double> probs, std::span<const std::uint8_t> targets, const FocalParams& params) {
  require_length(probs.size(), targets.size(), "focal_loss");
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    sum += focal_term(clamp_prob(probs[t], params.epsilon), targets[t] != 0, params);
  }
  return sum / static_cast<double>(probs.size());
}

double uni_focal(const model::ModelOutput& output, const SegmentLabels& labels, const FocalParams& params) {
  if (!output.branch_heads) raise(Errc::kUnknownBranch, "uni_focal needs visual and audio branch outputs");
  require_length(output.prob_visual.size(), labels.num_segments(), "uni_focal");
  require_length(output.prob_audio.size(), labels.num_segments(), "uni_focal");
  return focal_loss(output.prob_visual, labels.class_label, params) +
         focal_loss(output.prob_audio, labels.class_label, params);
}

double kl_alignment(std::span<const double> branch_probs, std::span<const double> fused_probs, double epsilon) {
  require_length(branch_probs.size(), fused_probs.size(), "kl_alignment");
  if (branch_probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < branch_probs.size(); ++t) {
    sum += bernoulli_kl(clamp_prob(branch_probs[t], epsilon), clamp_prob(fused_probs[t], epsilon));
  }
  return sum / static_cast<double>(branch_probs.size());
}

double interval_iou_loss(double tau, double ps, double pe, double gs, double ge) {
  const auto [rs, re] = predicted_relative(ps, pe);
  return 1.0 - giou_with_grad(tau + rs, tau + re, tau - gs, tau + ge).value;
}

double iou_regression_loss(std::span<const double> start_offset, std::span<const double> end_offset,
                           const SegmentLabels& labels, double segment_length) {
  const std::size_t n = labels.num_segments();
  require_length(start_offset.size(), n, "iou_regression_loss");
  require_length(end_offset.size(), n, "iou_regression_loss");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (!labels.valid_regression[t]) continue;
    sum += interval_iou_loss(segment_center(t, segment_length), start_offset[t], end_offset[t],
                             labels.start_offset[t], labels.end_offset[t]);
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

LossBreakdown total_loss(const model::ModelOutput& output, const SegmentLabels& labels, double segment_length,
                         const LossWeights& weights, const FocalParams& params) {
  require_length(output.size(), labels.num_segments(), "total_loss");
  LossBreakdown b;
  if (output.branch_heads) {
    b.uni_focal = uni_focal(output, labels, params);
    b.kl = kl_alignment(output.prob_visual, output.prob_fused, params.epsilon) +
           kl_alignment(output.prob_audio, output.prob_fused, params.epsilon);
  }
  b.mul_focal = focal_loss(output.prob_fused, labels.class_label, params);
  b.iou = iou_regression_loss(output.start_offset, output.end_offset, labels, segment_length);
  b.total = weights.uni_focal * b.uni_focal + weights.mul_focal * b.mul_focal + weights.alignment * b.kl +
            weights.iou * b.iou;
  return b;
}

ValueGrad focal_loss_from_logits(std::span<const double> logits, std::span<const std::uint8_t> targets,
                                 const FocalParams& fp) {
  require_length(logits.size(), targets.size(), "focal_loss");
  ValueGrad out;
  out.grad.assign(logits.size(), 0.0);
  if (logits.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  for (std::size_t t = 0; t < logits.size(); ++t) {
    const double raw = sigmoid(logits[t]);
    const double p = clamp_prob(raw, fp.epsilon);
    const bool positive = targets[t] != 0;
    out.value += focal_term(p, positive, fp);
    if (p != raw) continue;
    double g;
    if (positive) {
      g = fp.alpha * std::pow(1.0 - p, fp.gamma) * (fp.gamma * p * std::log(p) - (1.0 - p));
    } else {
      g = (1.0 - fp.alpha) * std::pow(p, fp.gamma) * (p - fp.gamma * (1.0 - p) * std::log(1.0 - p));
    }
    out.grad[t] = g * inv_n;
  }
  out.value *= inv_n;
  return out;
}

KlValueGrad kl_alignment_from_logits(std::span<const double> branch_logits, std::span<const double> fused_logits,
                                     double epsilon, bool detach_fused_target) {
  require_length(branch_logits.size(), fused_logits.size(), "kl_alignment");
  const std::size_t n = branch_logits.size();
  KlValueGrad out;
  out.grad_branch.assign(n, 0.0);
  out.grad_fused.assign(n, 0.0);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double p_raw = sigmoid(branch_logits[t]);
    const double q_raw = sigmoid(fused_logits[t]);
    const double p = clamp_prob(p_raw, epsilon);
    const double q = clamp_prob(q_raw, epsilon);
    out.value += bernoulli_kl(p, q);
    if (p == p_raw) {
      const double logit_gap = std::log(p / (1.0 - p)) - std::log(q / (1.0 - q));
      out.grad_branch[t] = p * (1.0 - p) * logit_gap * inv_n;
    }
    if (!detach_fused_target && q == q_raw) out.grad_fused[t] = (q - p) * inv_n;
  }
  out.value *= inv_n;
  return out;
}

IouValueGrad iou_regression_from_raw(std::span<const double> raw_start, std::span<const double> raw_end,
                                     double scale, const SegmentLabels& labels, double segment_length) {
  const std::size_t n = labels.num_segments();
  require_length(raw_start.size(), n, "iou_regression_loss");
  require_length(raw_end.size(), n, "iou_regression_loss");
  (void)segment_length;
  IouValueGrad out;
  out.grad_start.assign(n, 0.0);
  out.grad_end.assign(n, 0.0);
  std::size_t used = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (labels.valid_regression[t]) ++used;
  }
  if (used == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(used);
  for (std::size_t t = 0; t < n; ++t) {
    if (!labels.valid_regression[t]) continue;
    const double s = scale * std::max(0.0, raw_start[t]);
    const double e = scale * std::max(0.0, raw_end[t]);
    const auto [rs, re] = predicted_relative(s, e);
    const Giou g = giou_with_grad(rs, re, -labels.start_offset[t], labels.end_offset[t]);
    out.value += 1.0 - g.value;
      if (raw_start[t] > 0.0) out.grad_start[t] = g.d_start * scale * inv_n;
    if (raw_end[t] > 0.0) out.grad_end[t] = -g.d_end * scale * inv_n;
  }
  out.value *= inv_n;
  return out;
}

LossGradients total_loss_with_grad(const model::HeadOutputs& heads, const SegmentLabels& labels,
                                   double segment_length, const LossOptions& options) {
  const std::size_t n = labels.num_segments();
  require_length(heads.size(), n, "total_loss");
  const LossWeights& w = options.weights;
  LossGradients out;
  out.logit_visual.assign(n, 0.0);
  out.logit_audio.assign(n, 0.0);
  out.logit_fused.assign(n, 0.0);
  out.raw_start.assign(n, 0.0);
  out.raw_end.assign(n, 0.0);
  LossBreakdown& b = out.breakdown;

  auto accumulate = [](std::vector<double>& dst, const std::vector<double>& src, double weight) {
    if (weight == 0.0) return;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weight * src[i];
  };

  if (heads.branch_heads) {
    const ValueGrad fv = focal_loss_from_logits(heads.logit_visual, labels.class_label, options.focal);
    const ValueGrad fa = focal_loss_from_logits(heads.logit_audio, labels.class_label, options.focal);
    b.uni_focal = fv.value + fa.value;
    accumulate(out.logit_visual, fv.grad, w.uni_focal);
    accumulate(out.logit_audio, fa.grad, w.uni_focal);

    const KlValueGrad kv = kl_alignment_from_logits(heads.logit_visual, heads.logit_fused, options.focal.epsilon,
                                                    options.detach_fused_target);
    const KlValueGrad ka = kl_alignment_from_logits(heads.logit_audio, heads.logit_fused, options.focal.epsilon,
                                                    options.detach_fused_target);
    b.kl = kv.value + ka.value;
    accumulate(out.logit_visual, kv.grad_branch, w.alignment);
    accumulate(out.logit_audio, ka.grad_branch, w.alignment);
    accumulate(out.logit_fused, kv.grad_fused, w.alignment);
    accumulate(out.logit_fused, ka.grad_fused, w.alignment);
  }

  const ValueGrad fm = focal_loss_from_logits(heads.logit_fused, labels.class_label, options.focal);
  b.mul_focal = fm.value;
  accumulate(out.logit_fused, fm.grad, w.mul_focal);

  const IouValueGrad io =
      iou_regression_from_raw(heads.raw_start, heads.raw_end, heads.regression_scale, labels, segment_length);
  b.iou = io.value;
  accumulate(out.raw_start, io.grad_start, w.iou);
  accumulate(out.raw_end, io.grad_end, w.iou);

  b.total = w.uni_focal * b.uni_focal + w.mul_focal * b.mul_focal + w.alignment * b.kl + w.iou * b.iou;
  return out;
}

}  // namespace repurpose::losses
