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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "echotrace/corpus.h"
#include "echotrace/io.h"
#include "echotrace/pipeline.h"
#include "test_support.h"

namespace echotrace {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(ECHOTRACE_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json small_config(const fs::path& work) {
  return json{
      {"work_dir", work.string()},
      {"dumps",
       {testing::test_data("mini_submissions.jsonl").string(),
        testing::test_data("mini_comments.jsonl").string()}},
      {"model",
       {{"kind", "gbt"},
        {"gbt_grid",
         {{"max_depth", {3, 5}}, {"min_child_weight", {3}}, {"pos_weight", {3}}, {"n_trees", 20}}}}},
      {"evaluate", {{"ablation", true}, {"ablation_groups", {"op_pc_relation", "general"}}}},
      {"seed", 7},
  };
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(1);
  return p;
}

std::string config_arg(const fs::path& p) { return "--config " + p.string(); }

void run_all(const fs::path& config) {
  for (const char* stage :
       {"ingest", "featurize", "train", "evaluate", "stats", "export-augmented"}) {
    const CliResult r = cli(std::string(stage) + " " + config_arg(config));
    ASSERT_EQ(r.code, 0) << stage << ": " << r.output;
  }
}

TEST(Cli, FullRunWritesAllArtifacts) {
  testing::TempDir dir("cli-full");
  const fs::path cfg = write_config(dir.path(), small_config(dir.path() / "work"));
  run_all(cfg);
  const fs::path w = dir.path() / "work";
  for (const char* f :
       {"triples.train.jsonl", "triples.validation.jsonl", "triples.test.jsonl", "docs.jsonl",
        "ingest_report.json", "stats.json", "features.train.csv", "features.validation.csv",
        "features.test.csv", "model.json", "train_report.json", "report.json", "significance.csv",
        "decile_curve.csv", "decile_curve_pc_from_op.csv", "descriptives.json",
        "augmented.train.jsonl", "augmented.validation.jsonl", "augmented.test.jsonl"}) {
    EXPECT_TRUE(fs::exists(w / f)) << f;
  }
  const json ingest = json::parse(read_file(w / "ingest_report.json"));
  EXPECT_EQ(ingest["skipped_lines"], 1);
  EXPECT_GT(ingest["split_sizes"]["train"].get<int>(), 50);
  EXPECT_GT(ingest["split_sizes"]["test"].get<int>(), 10);

  const json report = json::parse(read_file(w / "report.json"));
  EXPECT_TRUE(report["report"]["all"]["f1"].is_number());
  EXPECT_EQ(report["ablation"]["groups"].size(), 2u);
  const json train = json::parse(read_file(w / "train_report.json"));
  EXPECT_EQ(train["grid"].size(), 2u);
  double total = 0;
  for (const auto& [k, v] : train["feature_importance"].items()) total += v.get<double>();
  EXPECT_NEAR(total, 100.0, 1e-6);

  // The adapter input lists three documents per triple.
  std::size_t docs = 0;
  for_each_line(w / "docs.jsonl", [&](std::string_view l, std::size_t) { docs += !l.empty(); });
  EXPECT_EQ(docs, 3 * ingest["triples"].get<std::size_t>());
}

TEST(Cli, SameSeedSameArtifacts) {
  testing::TempDir a("cli-a");
  testing::TempDir b("cli-b");
  const fs::path ca = write_config(a.path(), small_config(a.path() / "work"));
  const fs::path cb = write_config(b.path(), small_config(b.path() / "work"));
  run_all(ca);
  run_all(cb);
  for (const char* f : {"features.test.csv", "model.json", "report.json", "significance.csv",
                        "augmented.test.jsonl"}) {
    EXPECT_EQ(read_file(a.path() / "work" / f), read_file(b.path() / "work" / f)) << f;
  }
  // --seed overrides the config and changes only the random baseline.
  ASSERT_EQ(cli("evaluate --seed 99 " + config_arg(cb)).code, 0);
  const json ra = json::parse(read_file(a.path() / "work/report.json"));
  const json rb = json::parse(read_file(b.path() / "work/report.json"));
  EXPECT_EQ(rb["seed"], 99);
  EXPECT_EQ(ra["report"]["all"], rb["report"]["all"]);
}

TEST(Cli, MissingUpstreamNamesTheStage) {
  testing::TempDir dir("cli-missing");
  const fs::path cfg = write_config(dir.path(), small_config(dir.path() / "work"));
  CliResult r = cli("evaluate " + config_arg(cfg));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("train"), std::string::npos) << r.output;
  r = cli("featurize " + config_arg(cfg));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("ingest"), std::string::npos) << r.output;
  EXPECT_EQ(cli("train " + config_arg(dir.path() / "nope.json")).code, 2);
}

TEST(Cli, BadConfigIsSchemaError) {
  testing::TempDir dir("cli-bad");
  json j = small_config(dir.path() / "work");
  j["model"]["kind"] = "forest";
  EXPECT_EQ(cli("ingest " + config_arg(write_config(dir.path(), j))).code, 3);
  std::ofstream(dir.path() / "config.json") << "{not json";
  EXPECT_EQ(cli("ingest " + config_arg(dir.path() / "config.json")).code, 3);
  EXPECT_NE(cli("frobnicate").code, 0);
}

TEST(Cli, DataDirRootsRelativePaths) {
  testing::TempDir dir("cli-root");
  json j = small_config("work");
  j["dumps"] = {"mini_submissions.jsonl", "mini_comments.jsonl"};
  const fs::path cfg = write_config(dir.path(), j);
  for (const char* f : {"mini_submissions.jsonl", "mini_comments.jsonl"}) {
    fs::copy_file(testing::test_data(f), dir.path() / f);
  }
  // Without the variable, paths resolve next to the config file.
  ASSERT_EQ(cli("ingest " + config_arg(cfg)).code, 0);
  EXPECT_TRUE(fs::exists(dir.path() / "work/triples.train.jsonl"));

  // With it set, the same relative dump names resolve under that directory.
  testing::TempDir other("cli-root-env");
  json j2 = j;
  j2["work_dir"] = (other.path() / "w").string();
  const fs::path cfg2 = write_config(other.path(), j2);
  EXPECT_EQ(cli("ingest " + config_arg(cfg2)).code, 2);
  const std::string cmd = "ECHOTRACE_DATA_DIR=" + testing::test_data("").string() + " " +
                          ECHOTRACE_CLI + " ingest " + config_arg(cfg2) + " 2>/dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(other.path() / "w/triples.train.jsonl"));
}

// Places the bundled oracle triples into a work dir split 14/3/3.
void stage_oracle(const fs::path& work) {
  fs::create_directories(work);
  const auto all = read_triples(testing::test_data("oracle_triples.jsonl"));
  const std::span<const ConversationTriple> s(all);
  write_triples(work / "triples.train.jsonl", s.subspan(0, 14));
  write_triples(work / "triples.validation.jsonl", s.subspan(14, 3));
  write_triples(work / "triples.test.jsonl", s.subspan(17, 3));
}

TEST(Cli, ExchangeModeMatchesInProcess) {
  testing::TempDir dir("cli-exchange");
  const fs::path work = dir.path() / "work";
  stage_oracle(work);
  json j = small_config(work);
  j["annotation"] = {{"mode", "exchange"},
                     {"path", testing::test_data("oracle_exchange.jsonl").string()}};
  j["taxonomy"] = testing::test_data("taxonomy_slice.tsv").string();
  const fs::path cfg = write_config(dir.path(), j);
  const CliResult r = cli("featurize " + config_arg(cfg));
  ASSERT_EQ(r.code, 0) << r.output;

  const PipelineConfig pc = PipelineConfig::load(cfg);
  const auto annotator = make_annotator(pc);
  const auto train = annotate_triples(read_triples(work / "triples.train.jsonl"), *annotator);
  const CorpusStats stats = build_corpus_stats(train);
  const Taxonomy tax = Taxonomy::load(testing::test_data("taxonomy_slice.tsv"));
  for (std::string_view split : kSplits) {
    const auto triples =
        annotate_triples(read_triples(artifact::triples(pc, split)), *annotator);
    const auto expected = featurize_triples(triples, stats, tax).rows;
    const auto got = read_feature_csv(artifact::features(pc, split));
    ASSERT_EQ(got.size(), expected.size()) << split;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].stem, expected[i].stem);
      EXPECT_EQ(got[i].label, expected[i].label);
      EXPECT_EQ(got[i].features, expected[i].features);
    }
  }

  // A missing exchange file points at the annotation step.
  j["annotation"]["path"] = (dir.path() / "absent.jsonl").string();
  const CliResult missing = cli("featurize " + config_arg(write_config(dir.path(), j)));
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.output.find("annotate"), std::string::npos) << missing.output;
}

TEST(Cli, ExportAugmentedTokenStreams) {
  testing::TempDir dir("cli-export");
  const fs::path work = dir.path() / "work";
  stage_oracle(work);
  json j = small_config(work);
  j["annotation"] = {{"mode", "exchange"},
                     {"path", testing::test_data("oracle_exchange.jsonl").string()}};
  const fs::path cfg = write_config(dir.path(), j);
  ASSERT_EQ(cli("featurize " + config_arg(cfg)).code, 0);
  ASSERT_EQ(cli("export-augmented " + config_arg(cfg)).code, 0);

  const auto docs = read_exchange_file(testing::test_data("oracle_exchange.jsonl"));
  auto length = [&](const std::string& id) { return doc_from_exchange(docs.at(id)).length(); };
  const auto rows = read_feature_csv(work / "features.test.csv");
  std::size_t lines = 0;
  for_each_line(work / "augmented.test.jsonl", [&](std::string_view l, std::size_t) {
    if (l.empty()) return;
    ++lines;
    const json rec = json::parse(l);
    const std::string id = rec["triple_id"];
    const auto& tokens = rec["tokens"];
    ASSERT_EQ(tokens.size(), length(id + ":op") + length(id + ":pc") + 1);
    for (const auto& t : tokens) {
      ASSERT_EQ(t["features"].size(), kNumFeatures);
      for (double v : t["features"]) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      if (t["side"] == "sep") continue;
      const auto row = std::find_if(rows.begin(), rows.end(), [&](const CandidateRow& r) {
        return r.triple_id == id && r.stem == t["stem"];
      });
      ASSERT_NE(row, rows.end());
      EXPECT_EQ(t["label"], row->label);
    }
  });
  EXPECT_EQ(lines, 3u);
}

}  // namespace
}  // namespace echotrace
