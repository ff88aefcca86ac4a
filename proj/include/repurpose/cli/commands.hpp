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

#include <filesystem>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "repurpose/data/manifest.hpp"
#include "repurpose/data/synthetic.hpp"
#include "repurpose/error.hpp"
#include "repurpose/eval/metrics.hpp"
#include "repurpose/train/config.hpp"

namespace repurpose::cli {

namespace fs = std::filesystem;

/// Exit status contract.
enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kNumericalFailure = 4 };

ExitCode exit_code_for(Errc code) noexcept;

/// Provenance written as run_record.json in every run directory.
struct RunRecord {
  std::string run_id;
  nlohmann::ordered_json config_snapshot;
  std::string input_hash;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();  // name -> path relative to the run dir
};

nlohmann::ordered_json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::ordered_json& j);
void write_run_record(const fs::path& run_dir, const RunRecord& record);

/// Defaults, then the optional config file (merged as a JSON patch), then
/// each `key=value` override, then the seed.
nlohmann::ordered_json resolve_document(nlohmann::ordered_json defaults, const std::optional<fs::path>& config_file,
                                        const std::vector<std::string>& overrides,
                                        std::optional<std::uint64_t> seed);

/// Layout produced by cmd_synth under a data directory.
struct DataLayout {
  fs::path root;
  fs::path manifest(data::Split split) const;
};

struct SynthSummary {
  std::size_t count = 0;
  double mean_duration = 0.0;
  double clips_per_10min = 0.0;
  std::array<fs::path, 3> manifests;
};

SynthSummary cmd_synth(const data::SyntheticConfig& config, const fs::path& out_dir);

struct EvalSettings {
  eval::EvalOptions options{};
};
nlohmann::ordered_json to_json(const EvalSettings& settings);
EvalSettings eval_settings_from_json(const nlohmann::ordered_json& j);

struct TrainSummary {
  RunRecord record;
  std::size_t best_epoch = 0;
  double best_val_average = 0.0;
  double initial_val_average = 0.0;
  fs::path checkpoint;
};

/// Progress lines go to `log` when it is non-null.
TrainSummary cmd_train(const train::TrainConfig& config, const fs::path& data_dir, const fs::path& out_dir,
                       std::FILE* log = nullptr);

eval::EvalReport cmd_eval(const fs::path& checkpoint, const fs::path& manifest, const fs::path& out_dir,
                          const EvalSettings& settings = {});

/// Predictions for one video directory. With an annotation the caption
/// empty flags and duration come from it; otherwise the duration is the
/// segment count times the segment length and all-zero caption rows count
/// as empty.
eval::VideoPredictions cmd_predict(const fs::path& checkpoint, const fs::path& feature_dir,
                                   const std::optional<fs::path>& annotation, const fs::path& out_dir,
                                   const EvalSettings& settings = {}, double segment_length = 1.0);

enum class AblationAxis { kModality, kLossTerms, kLayerSplit };
AblationAxis parse_axis(std::string_view name);

struct AblationVariant {
  std::string name;
  train::TrainConfig config;
};

std::vector<AblationVariant> ablation_variants(const train::TrainConfig& base, AblationAxis axis);

/// Trains every variant in sequence and scores each best checkpoint on
/// the test split (validation when the test split is empty). Returns the
/// rendered table.
std::string cmd_ablate(const train::TrainConfig& base, AblationAxis axis, const fs::path& data_dir,
                       const fs::path& out_dir, std::FILE* log = nullptr);

/// Entry point behind the `repurpose` executable.
int run(int argc, char** argv);

}  // namespace repurpose::cli
