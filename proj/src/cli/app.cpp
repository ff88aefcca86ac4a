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

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "repurpose/cli/commands.hpp"
#include "repurpose/error.hpp"

namespace repurpose::cli {

namespace {

struct GlobalOptions {
  std::optional<fs::path> config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

train::TrainConfig resolve_train(const GlobalOptions& g) {
  const auto doc = resolve_document(train::to_json(train::TrainConfig{}), g.config, g.overrides, g.seed);
  return train::train_config_from_json(doc);
}

EvalSettings resolve_eval(const GlobalOptions& g) {
  return eval_settings_from_json(resolve_document(to_json(EvalSettings{}), g.config, g.overrides, std::nullopt));
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Temporal clip localisation for long-form video: synthetic data, training, evaluation."};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file merged over the defaults");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set weights.lambda4=0")->take_all();
  app.add_option("--seed", g.seed, "Seed for every random source");
  app.add_option("--out", g.out, "Run directory")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with 8/1/1 split manifests");

  fs::path data_dir;
  auto* train_cmd = app.add_subcommand("train", "Train on <data>/manifests/{train,val}.json");
  train_cmd->add_option("--data", data_dir, "Corpus directory produced by synth")->required();

  fs::path checkpoint, manifest;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a manifest");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--manifest", manifest, "Dataset manifest")->required();

  fs::path video_dir;
  std::optional<fs::path> annotation;
  double segment_length = 1.0;
  auto* predict_cmd = app.add_subcommand("predict", "Predict clips for one video");
  predict_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--video", video_dir, "Directory holding the video's feature arrays")->required();
  predict_cmd->add_option("--annotation", annotation, "Annotation JSON giving duration and captions");
  predict_cmd->add_option("--segment-length", segment_length, "Seconds per segment");

  std::string axis;
  auto* ablate_cmd = app.add_subcommand("ablate", "Train and score a sweep along one ablation axis");
  ablate_cmd->add_option("--axis", axis, "modality | loss_terms | layer_split")->required();
  ablate_cmd->add_option("--data", data_dir, "Corpus directory produced by synth")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (synth->parsed()) {
      auto doc = resolve_document(data::to_json(data::SyntheticConfig{}), g.config, g.overrides, g.seed);
      const auto s = cmd_synth(data::synthetic_config_from_json(doc), g.out);
      std::cout << "videos: " << s.count << "\nmean duration: " << fixed(s.mean_duration)
                << " s\nclips per 10 min: " << fixed(s.clips_per_10min) << "\n";
      for (const auto& m : s.manifests) std::cout << "manifest: " << m.string() << "\n";
    } else if (train_cmd->parsed()) {
      const auto s = cmd_train(resolve_train(g), data_dir, g.out, stderr);
      std::cout << "best epoch: " << s.best_epoch << "\nbest val avg mAP: " << fixed(s.best_val_average)
                << "\nuntrained val avg mAP: " << fixed(s.initial_val_average)
                << "\ncheckpoint: " << s.checkpoint.string() << "\n";
    } else if (eval_cmd->parsed()) {
      const auto report = cmd_eval(checkpoint, manifest, g.out, resolve_eval(g));
      const std::pair<std::string, eval::EvalReport> row{"model", report};
      std::cout << eval::format_table(std::span(&row, 1)) << "average mAP: " << fixed(report.average) << "\n";
    } else if (predict_cmd->parsed()) {
      const auto vp = cmd_predict(checkpoint, video_dir, annotation, g.out, resolve_eval(g), segment_length);
      std::cout << eval::predictions_to_json(vp).dump(2) << "\n";
    } else if (ablate_cmd->parsed()) {
      const AblationAxis parsed_axis = parse_axis(axis);
      std::cout << cmd_ablate(resolve_train(g), parsed_axis, data_dir, g.out, stderr);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace repurpose::cli
