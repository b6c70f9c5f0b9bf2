// Copyright 2026 The echotrace Authors.
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

#ifndef ECHOTRACE_PIPELINE_H_
#define ECHOTRACE_PIPELINE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "echotrace/annotate.h"
#include "echotrace/learn.h"

namespace echotrace {

enum class AnnotationMode { kBuiltin, kExchange };

struct PipelineConfig {
  std::filesystem::path work_dir;
  std::vector<std::filesystem::path> dumps;
  AnnotationMode annotation = AnnotationMode::kBuiltin;
  std::filesystem::path exchange_path;  // used in exchange mode
  std::optional<std::filesystem::path> taxonomy;  // bundled taxonomy when unset
  int test_months = 6;
  int validation_months = 6;
  bool js_distance = false;
  ModelKind model = ModelKind::kGbt;
  double threshold = 0.5;
  std::vector<LogRegConfig> logreg_grid = GridSpec::default_logreg();
  std::vector<GbtConfig> gbt_grid = GridSpec::default_gbt(50);
  double random_p = 0.15;
  bool run_ablation = false;
  std::vector<std::string> ablation_groups = {"non_contextual", "op_usage", "pc_usage",
                                              "op_pc_relation", "general"};
  std::uint64_t seed = 0;

  // Relative paths in the JSON resolve against `root`.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& root);
  // Reads a JSON config. The path root is $ECHOTRACE_DATA_DIR when set,
  // otherwise the config file's directory.
  static PipelineConfig load(const std::filesystem::path& path);
};

// Artifact locations inside work_dir.
namespace artifact {
std::filesystem::path triples(const PipelineConfig& c, std::string_view split);
std::filesystem::path requests(const PipelineConfig& c);
std::filesystem::path ingest_report(const PipelineConfig& c);
std::filesystem::path stats(const PipelineConfig& c);
std::filesystem::path features(const PipelineConfig& c, std::string_view split);
std::filesystem::path model(const PipelineConfig& c);
std::filesystem::path train_report(const PipelineConfig& c);
std::filesystem::path report(const PipelineConfig& c);
std::filesystem::path significance(const PipelineConfig& c);
std::filesystem::path decile_curve(const PipelineConfig& c);
std::filesystem::path decile_curve_pc(const PipelineConfig& c);
std::filesystem::path descriptives(const PipelineConfig& c);
std::filesystem::path augmented(const PipelineConfig& c, std::string_view split);
}  // namespace artifact

inline constexpr std::array<std::string_view, 3> kSplits = {"train", "validation", "test"};

std::unique_ptr<Annotator> make_annotator(const PipelineConfig& config);

// Each stage reads its inputs from work_dir, throws StageError naming the
// producing stage when one is missing, and writes its outputs atomically.
void run_ingest(const PipelineConfig& config);
void run_featurize(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_evaluate(const PipelineConfig& config);
void run_stats(const PipelineConfig& config);
void run_export_augmented(const PipelineConfig& config);

}  // namespace echotrace

#endif  // ECHOTRACE_PIPELINE_H_
