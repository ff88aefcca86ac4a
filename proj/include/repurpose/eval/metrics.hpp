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

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "repurpose/core/video.hpp"
#include "repurpose/eval/decode.hpp"

namespace repurpose::eval {

struct VideoPredictions {
  std::string video_id;
  std::vector<ClipPrediction> predictions;
};

struct VideoGroundTruth {
  std::string video_id;
  std::vector<Interval> clips;
};

/// Detection AP over a pooled, score-ranked list of every video's
/// predictions. Each prediction claims the unmatched ground-truth clip of
/// its own video with the highest tIoU; it is a true positive when that
/// tIoU reaches `tiou_threshold`. All-point interpolated area under the
/// precision-recall curve. Throws kVideoIdMismatch for predictions on
/// videos absent from the ground truth.
double average_precision(std::span<const VideoPredictions> predictions,
                         std::span<const VideoGroundTruth> ground_truth, double tiou_threshold);

inline constexpr std::array<double, 5> kTiouThresholds{0.5, 0.6, 0.7, 0.8, 0.9};

struct VideoDiagnostics {
  std::string video_id;
  std::size_t num_predictions = 0;
  std::size_t num_gt = 0;
  std::vector<double> best_tiou_per_gt;

  bool operator==(const VideoDiagnostics&) const = default;
};

struct EvalReport {
  std::array<double, kTiouThresholds.size()> ap_per_threshold{};
  double average = 0.0;
  std::vector<VideoDiagnostics> per_video;

  bool operator==(const EvalReport&) const = default;
};

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::ordered_json& j);

/// Aligned table, one row per named report, AP in percent.
std::string format_table(std::span<const std::pair<std::string, EvalReport>> rows);

using Predictor = std::function<model::ModelOutput(const VideoSample&)>;

struct EvalOptions {
  double conf_threshold = 0.5;
  SoftNmsParams nms{};
  bool operator==(const EvalOptions&) const = default;
};

struct EvalResult {
  EvalReport report;
  std::vector<VideoPredictions> predictions;
};

/// Per video: predict, decode, soft-NMS, keep the top k; then AP at every
/// threshold. Videos are processed in the given order.
EvalResult evaluate(const Predictor& predictor, std::span<const VideoSample> videos, const EvalOptions& options = {});

/// Ground-truth outputs: probability 1 with exact offsets on clip
/// segments, 0 elsewhere.
model::ModelOutput oracle_output(const VideoSample& sample);

nlohmann::ordered_json predictions_to_json(const VideoPredictions& predictions);

}  // namespace repurpose::eval
