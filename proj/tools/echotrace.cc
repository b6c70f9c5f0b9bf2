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

// Command-line driver for the echo-prediction pipeline.

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "echotrace/error.h"
#include "echotrace/pipeline.h"

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kMissingInput = 2;
constexpr int kBadSchema = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echotrace: predict which explanandum words are echoed in explanations"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed = 0;
  bool seed_given = false;

  const std::map<std::string, std::pair<std::string, std::function<void(const echotrace::PipelineConfig&)>>>
      commands = {
          {"ingest", {"extract triples from dumps and split them by time", echotrace::run_ingest}},
          {"featurize", {"annotate triples and write per-stem feature tables", echotrace::run_featurize}},
          {"train", {"grid-search a model on train/validation features", echotrace::run_train}},
          {"evaluate", {"score the model on test features", echotrace::run_evaluate}},
          {"stats", {"corpus descriptives, decile curves and significance tests", echotrace::run_stats}},
          {"export-augmented",
           {"write feature-augmented token streams", echotrace::run_export_augmented}},
      };

  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "pipeline config (JSON)")->required();
    sub->add_option("--seed", seed, "seed for every random draw")
        ->each([&](const std::string&) { seed_given = true; });
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  try {
    echotrace::PipelineConfig config = echotrace::PipelineConfig::load(config_path);
    if (seed_given) config.seed = static_cast<std::uint64_t>(seed);
    commands.at(chosen->get_name()).second(config);
  } catch (const echotrace::StageError& e) {
    fmt::print(stderr, "echotrace {}: missing input from stage '{}': {}\n", chosen->get_name(),
               e.stage(), e.what());
    return kMissingInput;
  } catch (const echotrace::SchemaError& e) {
    fmt::print(stderr, "echotrace {}: schema error: {}\n", chosen->get_name(), e.what());
    return kBadSchema;
  } catch (const echotrace::IoError& e) {
    fmt::print(stderr, "echotrace {}: {}\n", chosen->get_name(), e.what());
    return kMissingInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "echotrace {}: {}\n", chosen->get_name(), e.what());
    return kFailure;
  }
  return kOk;
}
