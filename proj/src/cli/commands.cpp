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

#include "repurpose/cli/commands.hpp"

#include <cstdio>
#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>

#include "repurpose/core/hash.hpp"
#include "repurpose/data/feature_store.hpp"
#include "repurpose/data/manifest.hpp"
#include "repurpose/error.hpp"
#include "repurpose/model/checkpoint.hpp"
#include "repurpose/model/network.hpp"
#include "repurpose/train/trainer.hpp"

namespace repurpose::cli {

using nlohmann::ordered_json;

ExitCode exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument:
    case Errc::kInvalidConfig:
    case Errc::kInvalidSchedule:
    case Errc::kUnknownBranch:
      return kUsage;
    case Errc::kNonFiniteLoss:
      return kNumericalFailure;
    default:
      return kDataError;
  }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) raise(Errc::kIoError, "short write to " + path.string());
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::kIoError, "cannot read " + path.string());
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) raise(Errc::kSchemaError, path.string() + " is not valid JSON");
  return j;
}

class JsonLines {
 public:
  explicit JsonLines(const fs::path& path) {
    fs::create_directories(path.parent_path());
    out_.open(path, std::ios::trunc);
    if (!out_) raise(Errc::kIoError, "cannot write " + path.string());
  }
  void write(const ordered_json& j) {
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

std::string run_id_for(std::string_view command, const std::string& input_hash) {
  return std::string(command) + "-" + input_hash.substr(0, 12);
}

ordered_json threshold_map(const eval::EvalReport& r) { return to_json(r).at("ap_per_threshold"); }

void say(std::FILE* log, const std::string& line) {
  if (log != nullptr) {
    std::fprintf(log, "%s\n", line.c_str());
    std::fflush(log);
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

ordered_json to_json(const RunRecord& r) {
  return {{"run_id", r.run_id},
          {"config_snapshot", r.config_snapshot},
          {"input_hash", r.input_hash},
          {"artifacts", r.artifacts}};
}

RunRecord run_record_from_json(const ordered_json& j) {
  try {
    return {j.at("run_id").get<std::string>(), j.at("config_snapshot"), j.at("input_hash").get<std::string>(),
            j.at("artifacts")};
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::kSchemaError, std::string("malformed run record: ") + e.what());
  }
}

void write_run_record(const fs::path& run_dir, const RunRecord& record) {
  write_json(run_dir / "run_record.json", to_json(record));
}

ordered_json resolve_document(ordered_json defaults, const std::optional<fs::path>& config_file,
                              const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed) {
  if (config_file) {
    const ordered_json patch = read_json(*config_file);
    if (!patch.is_object()) raise(Errc::kInvalidConfig, config_file->string() + " must hold a JSON object");
    defaults.merge_patch(patch);
  }
  for (const auto& o : overrides) train::apply_override(defaults, o);
  if (seed) defaults["seed"] = *seed;
  return defaults;
}

fs::path DataLayout::manifest(data::Split split) const {
  return root / "manifests" / (std::string(data::split_name(split)) + ".json");
}

SynthSummary cmd_synth(const data::SyntheticConfig& config, const fs::path& out_dir) {
  config.validate();
  const fs::path root = fs::absolute(out_dir);
  const auto corpus = data::generate_synthetic(config);

  std::vector<data::ManifestEntry> entries;
  SynthSummary summary;
  double total_duration = 0.0;
  std::size_t total_clips = 0;
  for (const auto& sample : corpus) {
    entries.push_back(data::save_video(sample, root / "features" / sample.video_id,
                                       root / "annotations" / (sample.video_id + ".json")));
    total_duration += sample.duration;
    total_clips += sample.clips.size();
  }
  summary.count = corpus.size();
  summary.mean_duration = total_duration / static_cast<double>(corpus.size());
  summary.clips_per_10min = 600.0 * static_cast<double>(total_clips) / total_duration;

  const auto splits = data::split_manifest(entries, {8, 1, 1}, config.seed);
  const DataLayout layout{root};
  ordered_json artifacts = ordered_json::object();
  for (std::size_t i = 0; i < splits.size(); ++i) {
    summary.manifests[i] = layout.manifest(splits[i].split);
    data::write_manifest(summary.manifests[i], splits[i]);
    artifacts[std::string(data::split_name(splits[i].split)) + "_manifest"] =
        fs::relative(summary.manifests[i], root).generic_string();
  }

  const ordered_json snapshot = to_json(config);
  write_json(root / "config.json", snapshot);
  ordered_json stats = {{"count", summary.count},
                        {"mean_duration", summary.mean_duration},
                        {"clips_per_10min", summary.clips_per_10min},
                        {"splits",
                         {{"train", splits[0].entries.size()},
                          {"val", splits[1].entries.size()},
                          {"test", splits[2].entries.size()}}}};
  write_json(root / "reports" / "corpus_stats.json", stats);
  artifacts["config"] = "config.json";
  artifacts["corpus_stats"] = "reports/corpus_stats.json";

  const std::string hash = sha256_hex("synth\n" + snapshot.dump());
  write_run_record(root, {run_id_for("synth", hash), snapshot, hash, artifacts});
  return summary;
}

ordered_json to_json(const EvalSettings& s) {
  return {{"conf_threshold", s.options.conf_threshold},
          {"nms_sigma", s.options.nms.sigma},
          {"nms_score_floor", s.options.nms.score_floor}};
}

EvalSettings eval_settings_from_json(const ordered_json& j) {
  EvalSettings s;
  try {
    s.options.conf_threshold = j.value("conf_threshold", s.options.conf_threshold);
    s.options.nms.sigma = j.value("nms_sigma", s.options.nms.sigma);
    s.options.nms.score_floor = j.value("nms_score_floor", s.options.nms.score_floor);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::kInvalidConfig, std::string("malformed evaluation config: ") + e.what());
  }
  if (!(s.options.nms.sigma > 0.0)) raise(Errc::kInvalidConfig, "nms_sigma must be positive");
  return s;
}

TrainSummary cmd_train(const train::TrainConfig& config, const fs::path& data_dir, const fs::path& out_dir,
                       std::FILE* log) {
  config.validate();
  const DataLayout layout{data_dir};
  const fs::path train_manifest = layout.manifest(data::Split::kTrain);
  const fs::path val_manifest = layout.manifest(data::Split::kVal);
  const auto train_set = data::load_manifest(data::read_manifest(train_manifest));
  const auto val_set = data::load_manifest(data::read_manifest(val_manifest));

  const ordered_json snapshot = to_json(config);
  write_json(out_dir / "config.json", snapshot);
  const std::string hash = sha256_hex("train\n" + snapshot.dump() + "\n" + sha256_file(train_manifest) + "\n" +
                                      sha256_file(val_manifest));

  JsonLines steps(out_dir / "logs" / "train_steps.jsonl");
  JsonLines epochs(out_dir / "logs" / "train_epochs.jsonl");
  const fs::path checkpoint = out_dir / "checkpoint";

  train::Trainer trainer(config, train_set, val_set);
  train::TrainHooks hooks;
  hooks.on_step = [&](const train::StepRecord& s) {
    steps.write({{"step", s.step},
                 {"total", s.loss.total},
                 {"uni_focal", s.loss.uni_focal},
                 {"mul_focal", s.loss.mul_focal},
                 {"kl", s.loss.kl},
                 {"iou", s.loss.iou}});
  };
  hooks.on_epoch = [&](const train::EpochRecord& e) {
    epochs.write({{"epoch", e.epoch},
                  {"val_mAP_per_threshold", threshold_map(e.val)},
                  {"val_avg_mAP", e.val.average},
                  {"lr", e.lr},
                  {"train_loss", e.mean_loss.total}});
    char name[32];
    std::snprintf(name, sizeof name, "val_epoch_%03zu.json", e.epoch);
    write_json(out_dir / "reports" / name, to_json(e.val));
    say(log, "epoch " + std::to_string(e.epoch) + "/" + std::to_string(config.epochs) +
                 "  loss " + fixed(e.mean_loss.total) + "  val avg mAP " + fixed(e.val.average));
  };
  hooks.on_best = [&](const model::Network& net, const train::EpochRecord& e) {
    model::write_checkpoint(checkpoint,
                            model::snapshot(net, {{"epoch", e.epoch}, {"val_avg_mAP", e.val.average}}));
  };

  train::TrainResult result = [&] {
    try {
      return trainer.run(hooks);
    } catch (const Error& e) {
      if (e.code() == Errc::kNonFiniteLoss) {
        write_json(out_dir / "logs" / "nonfinite.json", {{"error", errc_name(e.code())}, {"detail", e.what()}});
      }
      throw;
    }
  }();

  model::write_checkpoint(out_dir / "checkpoint.last",
                          model::snapshot(result.final_model, {{"epoch", config.epochs}}));
  write_json(out_dir / "reports" / "initial_val.json", to_json(result.initial_val));

  TrainSummary summary;
  summary.best_epoch = result.best_epoch;
  summary.best_val_average = result.history.at(result.best_epoch - 1).val.average;
  summary.initial_val_average = result.initial_val.average;
  summary.checkpoint = checkpoint;
  summary.record = {run_id_for("train", hash), snapshot, hash,
                    {{"config", "config.json"},
                     {"checkpoint", "checkpoint"},
                     {"last_checkpoint", "checkpoint.last"},
                     {"step_log", "logs/train_steps.jsonl"},
                     {"epoch_log", "logs/train_epochs.jsonl"},
                     {"reports", "reports"}}};
  write_run_record(out_dir, summary.record);
  return summary;
}

namespace {

eval::Predictor predictor_for(const model::Checkpoint& ckpt, std::shared_ptr<model::Network>& holder) {
  if (ckpt.kind == "oracle") return [](const VideoSample& s) { return eval::oracle_output(s); };
  if (ckpt.kind != "network") raise(Errc::kCorruptContainer, "unknown checkpoint kind '" + ckpt.kind + "'");
  holder = std::make_shared<model::Network>(model::instantiate(ckpt));
  return [net = holder](const VideoSample& s) { return net->predict(s); };
}

}  // namespace

eval::EvalReport cmd_eval(const fs::path& checkpoint, const fs::path& manifest, const fs::path& out_dir,
                          const EvalSettings& settings) {
  const model::Checkpoint ckpt = model::read_checkpoint(checkpoint);
  const auto videos = data::load_manifest(data::read_manifest(manifest));
  for (const auto& v : videos) model::require_compatible(ckpt.model, v.dims());

  std::shared_ptr<model::Network> holder;
  const eval::EvalResult result = eval::evaluate(predictor_for(ckpt, holder), videos, settings.options);

  const ordered_json snapshot = to_json(settings);
  write_json(out_dir / "config.json", snapshot);
  write_json(out_dir / "reports" / "eval_report.json", to_json(result.report));
  const std::pair<std::string, eval::EvalReport> row{"model", result.report};
  write_text(out_dir / "reports" / "eval_table.txt", eval::format_table(std::span(&row, 1)));
  ordered_json dump = ordered_json::array();
  for (const auto& vp : result.predictions) dump.push_back(eval::predictions_to_json(vp));
  write_json(out_dir / "reports" / "predictions.json", dump);

  const std::string hash =
      sha256_hex("eval\n" + snapshot.dump() + "\n" + sha256_file(checkpoint) + "\n" + sha256_file(manifest));
  write_run_record(out_dir, {run_id_for("eval", hash), snapshot, hash,
                             {{"config", "config.json"},
                              {"report", "reports/eval_report.json"},
                              {"table", "reports/eval_table.txt"},
                              {"predictions", "reports/predictions.json"}}});
  return result.report;
}

eval::VideoPredictions cmd_predict(const fs::path& checkpoint, const fs::path& feature_dir,
                                   const std::optional<fs::path>& annotation, const fs::path& out_dir,
                                   const EvalSettings& settings, double segment_length) {
  const model::Checkpoint ckpt = model::read_checkpoint(checkpoint);
  VideoSample sample;
  if (annotation) {
    const data::Annotation ann = data::read_annotation(*annotation);
    sample = data::load_video({ann.video_id, ann.duration, feature_dir, *annotation}, {segment_length, true});
  } else {
    sample.video_id = fs::path(feature_dir).filename().string();
    sample.segment_length = segment_length;
    sample.visual = data::read_feature_array(feature_dir, Modality::kVisual);
    sample.audio = data::read_feature_array(feature_dir, Modality::kAudio);
    sample.caption = data::read_feature_array(feature_dir, Modality::kCaption);
    sample.duration = static_cast<double>(sample.visual.rows()) * segment_length;
    sample.caption_empty.resize(sample.caption.rows());
    for (std::size_t t = 0; t < sample.caption.rows(); ++t) {
      const auto row = sample.caption.row(t);
      sample.caption_empty[t] = std::all_of(row.begin(), row.end(), [](float x) { return x == 0.0f; }) ? 1 : 0;
    }
    sample.validate();
  }
  model::require_compatible(ckpt.model, sample.dims());

  std::shared_ptr<model::Network> holder;
  const model::ModelOutput out = predictor_for(ckpt, holder)(sample);
  eval::VideoPredictions vp{sample.video_id,
                            eval::postprocess(out, sample.segment_length, sample.duration,
                                              settings.options.conf_threshold, settings.options.nms)};
  const ordered_json snapshot = to_json(settings);
  write_json(out_dir / "config.json", snapshot);
  write_json(out_dir / "predictions.json", eval::predictions_to_json(vp));
  const std::string hash = sha256_hex("predict\n" + snapshot.dump() + "\n" + sha256_file(checkpoint) + "\n" +
                                      sha256_file(fs::path(feature_dir) / "visual.f32"));
  write_run_record(out_dir, {run_id_for("predict", hash), snapshot, hash,
                             {{"config", "config.json"}, {"predictions", "predictions.json"}}});
  return vp;
}

AblationAxis parse_axis(std::string_view name) {
  if (name == "modality") return AblationAxis::kModality;
  if (name == "loss_terms") return AblationAxis::kLossTerms;
  if (name == "layer_split") return AblationAxis::kLayerSplit;
  raise(Errc::kInvalidArgument,
        "unknown ablation axis '" + std::string(name) + "' (expected modality, loss_terms or layer_split)");
}

std::vector<AblationVariant> ablation_variants(const train::TrainConfig& base, AblationAxis axis) {
  std::vector<AblationVariant> out;
  switch (axis) {
    case AblationAxis::kModality:
      for (const char* m : {"A", "V", "C", "A&V", "A&V&C"}) {
        train::TrainConfig c = base;
        c.ablation.modalities = model::ModalitySet::parse(m);
        c.model.modalities = c.ablation.modalities;
        out.push_back({m, c});
      }
      break;
    case AblationAxis::kLossTerms:
      for (bool uf : {false, true}) {
        for (bool al : {false, true}) {
          train::TrainConfig c = base;
          c.ablation.uni_focal_on = uf;
          c.ablation.alignment_on = al;
          out.push_back({std::string("UF ") + (uf ? "on" : "off") + ", AL " + (al ? "on" : "off"), c});
        }
      }
      break;
    case AblationAxis::kLayerSplit:
      for (auto [s, c_layers, f] : {std::array<std::size_t, 3>{1, 4, 4}, std::array<std::size_t, 3>{3, 3, 3},
                                    std::array<std::size_t, 3>{5, 2, 2}, std::array<std::size_t, 3>{7, 1, 1}}) {
        train::TrainConfig c = base;
        c.model.n_self_layers = s;
        c.model.n_caption_layers = c_layers;
        c.model.n_fusion_layers = f;
        out.push_back({std::to_string(s) + "/" + std::to_string(c_layers) + "/" + std::to_string(f), c});
      }
      break;
  }
  return out;
}

namespace {

std::string slug(const std::string& name) {
  std::string s;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      s += ch;
    } else if (!s.empty() && s.back() != '-') {
      s += '-';
    }
  }
  while (!s.empty() && s.back() == '-') s.pop_back();
  return s;
}

}  // namespace

std::string cmd_ablate(const train::TrainConfig& base, AblationAxis axis, const fs::path& data_dir,
                       const fs::path& out_dir, std::FILE* log) {
  const DataLayout layout{data_dir};
  fs::path score_manifest = layout.manifest(data::Split::kTest);
  if (!fs::exists(score_manifest) || data::read_manifest(score_manifest).entries.empty()) {
    score_manifest = layout.manifest(data::Split::kVal);
  }

  std::vector<std::pair<std::string, eval::EvalReport>> rows;
  ordered_json variants = ordered_json::array();
  for (const auto& v : ablation_variants(base, axis)) {
    say(log, "== variant " + v.name);
    const fs::path dir = out_dir / "variants" / slug(v.name);
    const TrainSummary ts = cmd_train(v.config, data_dir, dir, log);
    const eval::EvalReport report = cmd_eval(ts.checkpoint, score_manifest, dir / "scored");
    rows.emplace_back(v.name, report);
    variants.push_back({{"name", v.name},
                        {"run_dir", fs::relative(dir, out_dir).generic_string()},
                        {"best_epoch", ts.best_epoch},
                        {"ap_per_threshold", threshold_map(report)},
                        {"average", report.average}});
  }
  const std::string table = eval::format_table(rows);
  const ordered_json snapshot = to_json(base);
  write_json(out_dir / "config.json", snapshot);
  write_text(out_dir / "reports" / "ablation_table.txt", table);
  write_json(out_dir / "reports" / "ablation.json",
             {{"scored_on", fs::path(score_manifest).filename().string()}, {"variants", variants}});
  const std::string hash = sha256_hex("ablate\n" + snapshot.dump() + "\n" + std::to_string(static_cast<int>(axis)));
  write_run_record(out_dir, {run_id_for("ablate", hash), snapshot, hash,
                             {{"config", "config.json"},
                              {"table", "reports/ablation_table.txt"},
                              {"summary", "reports/ablation.json"}}});
  return table;
}

}  // namespace repurpose::cli
