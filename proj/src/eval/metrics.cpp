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

#include "repurpose/eval/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "repurpose/core/labels.hpp"
#include "repurpose/error.hpp"

namespace repurpose::eval {

using nlohmann::ordered_json;

double average_precision(std::span<const VideoPredictions> predictions,
                         std::span<const VideoGroundTruth> ground_truth, double tiou_threshold) {
  std::unordered_map<std::string, std::size_t> gt_index;
  std::size_t total_gt = 0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    gt_index.emplace(ground_truth[i].video_id, i);
    total_gt += ground_truth[i].clips.size();
  }

  struct Ranked {
    double score;
    std::size_t video;
    const ClipPrediction* prediction;
  };
  std::vector<Ranked> ranked;
  for (const auto& vp : predictions) {
    auto it = gt_index.find(vp.video_id);
    if (it == gt_index.end()) raise(Errc::kVideoIdMismatch, "predictions for unknown video '" + vp.video_id + "'");
    for (const auto& p : vp.predictions) ranked.push_back({p.score, it->second, &p});
  }
  if (ranked.empty() || total_gt == 0) return 0.0;
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  std::vector<std::vector<bool>> used(ground_truth.size());
  for (std::size_t i = 0; i < ground_truth.size(); ++i) used[i].assign(ground_truth[i].clips.size(), false);

  std::vector<double> precision(ranked.size());
  std::vector<double> recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& clips = ground_truth[ranked[r].video].clips;
    auto& taken = used[ranked[r].video];
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < clips.size(); ++j) {
      if (taken[j]) continue;
      const double o = tiou(ranked[r].prediction->interval, clips[j]);
      if (o > best) {
        best = o;
        best_j = j;
      }
    }
    if (best >= tiou_threshold) {
      taken[best_j] = true;
      ++tp;
    }
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    recall[r] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }

  for (std::size_t r = ranked.size() - 1; r-- > 0;) precision[r] = std::max(precision[r], precision[r + 1]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    ap += (recall[r] - prev_recall) * precision[r];
    prev_recall = recall[r];
  }
  return ap;
}

namespace {

std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", t);
  return buf;
}

}  // namespace

ordered_json to_json(const EvalReport& report) {
  ordered_json j;
  ordered_json ap = ordered_json::object();
  for (std::size_t i = 0; i < kTiouThresholds.size(); ++i) ap[threshold_key(kTiouThresholds[i])] = report.ap_per_threshold[i];
  j["ap_per_threshold"] = std::move(ap);
  j["average"] = report.average;
  ordered_json videos = ordered_json::array();
  for (const auto& v : report.per_video) {
    videos.push_back({{"video_id", v.video_id},
                      {"num_predictions", v.num_predictions},
                      {"num_gt", v.num_gt},
                      {"best_tiou_per_gt", v.best_tiou_per_gt}});
  }
  j["per_video"] = std::move(videos);
  return j;
}

EvalReport eval_report_from_json(const ordered_json& j) {
  EvalReport r;
  try {
    for (std::size_t i = 0; i < kTiouThresholds.size(); ++i) {
      r.ap_per_threshold[i] = j.at("ap_per_threshold").at(threshold_key(kTiouThresholds[i])).get<double>();
    }
    r.average = j.at("average").get<double>();
    for (const auto& v : j.at("per_video")) {
      r.per_video.push_back({v.at("video_id").get<std::string>(), v.at("num_predictions").get<std::size_t>(),
                             v.at("num_gt").get<std::size_t>(), v.at("best_tiou_per_gt").get<std::vector<double>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::kSchemaError, std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

std::string format_table(std::span<const std::pair<std::string, EvalReport>> rows) {
  std::size_t name_width = 7;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  std::string out;
  char cell[32];
  out.append(name_width, ' ');
  for (double t : kTiouThresholds) {
    std::snprintf(cell, sizeof cell, "%8.1f", t);
    out += cell;
  }
  out += "    Avg.\n";
  for (const auto& [name, report] : rows) {
    out += name;
    out.append(name_width - name.size(), ' ');
    for (double ap : report.ap_per_threshold) {
      std::snprintf(cell, sizeof cell, "%8.2f", 100.0 * ap);
      out += cell;
    }
    std::snprintf(cell, sizeof cell, "%8.2f\n", 100.0 * report.average);
    out += cell;
  }
  return out;
}

EvalResult evaluate(const Predictor& predictor, std::span<const VideoSample> videos, const EvalOptions& options) {
  EvalResult result;
  std::vector<VideoGroundTruth> truth;
  for (const auto& video : videos) {
    const model::ModelOutput out = predictor(video);
    VideoPredictions vp{video.video_id,
                        postprocess(out, video.segment_length, video.duration, options.conf_threshold, options.nms)};
    VideoDiagnostics diag{video.video_id, vp.predictions.size(), video.clips.size(), {}};
    for (const auto& clip : video.clips) {
      double best = 0.0;
      for (const auto& p : vp.predictions) best = std::max(best, tiou(p.interval, clip));
      diag.best_tiou_per_gt.push_back(best);
    }
    result.report.per_video.push_back(std::move(diag));
    result.predictions.push_back(std::move(vp));
    truth.push_back({video.video_id, video.clips});
  }
  for (std::size_t i = 0; i < kTiouThresholds.size(); ++i) {
    result.report.ap_per_threshold[i] = average_precision(result.predictions, truth, kTiouThresholds[i]);
  }
  result.report.average =
      std::accumulate(result.report.ap_per_threshold.begin(), result.report.ap_per_threshold.end(), 0.0) /
      static_cast<double>(kTiouThresholds.size());
  return result;
}

model::ModelOutput oracle_output(const VideoSample& sample) {
  const SegmentLabels labels = clips_to_labels(sample.clips, sample.duration, sample.segment_length);
  model::ModelOutput out;
  const std::size_t n = labels.num_segments();
  out.prob_fused.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.prob_fused[t] = labels.class_label[t] ? 1.0 : 0.0;
  out.prob_visual = out.prob_fused;
  out.prob_audio = out.prob_fused;
  out.start_offset = labels.start_offset;
  out.end_offset = labels.end_offset;
  return out;
}

ordered_json predictions_to_json(const VideoPredictions& vp) {
  ordered_json preds = ordered_json::array();
  for (const auto& p : vp.predictions) {
    preds.push_back({{"start", p.interval.start()}, {"end", p.interval.end()}, {"score", p.score}});
  }
  return {{"video_id", vp.video_id}, {"predictions", std::move(preds)}};
}

}  // namespace repurpose::eval
