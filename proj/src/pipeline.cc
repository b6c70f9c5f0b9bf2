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

#include "echotrace/pipeline.h"

#include <cstdlib>

#include <fmt/core.h>

#include "echotrace/corpus.h"
#include "echotrace/error.h"
#include "echotrace/eval.h"
#include "echotrace/features.h"
#include "echotrace/io.h"

namespace echotrace {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve(const fs::path& root, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : root / path;
}

template <typename T>
std::vector<T> list_or(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<T>>();
}

std::vector<LogRegConfig> logreg_grid_from_json(const json& j) {
  const LogRegConfig defaults;
  std::vector<std::vector<double>> weights = {{0.25, 0.75}, {0.20, 0.80}, {0.15, 0.85}};
  weights = list_or(j, "class_weights", weights);
  std::vector<LogRegConfig> out;
  for (double c : list_or<double>(j, "C", {0.1, 1, 10, 100, 1000, 10000})) {
    for (const auto& w : weights) {
      if (w.size() != 2) throw SchemaError("class_weights entries need two values");
      LogRegConfig cfg;
      cfg.c = c;
      cfg.neg_weight = w[0];
      cfg.pos_weight = w[1];
      cfg.max_iter = j.value("max_iter", defaults.max_iter);
      cfg.tolerance = j.value("tolerance", defaults.tolerance);
      out.push_back(cfg);
    }
  }
  return out;
}

std::vector<GbtConfig> gbt_grid_from_json(const json& j) {
  const GbtConfig defaults;
  std::vector<GbtConfig> out;
  for (int depth : list_or<int>(j, "max_depth", {5, 7, 9})) {
    for (double mcw : list_or<double>(j, "min_child_weight", {3, 5, 7})) {
      for (double pw : list_or<double>(j, "pos_weight", {3, 4, 5})) {
        GbtConfig cfg;
        cfg.max_depth = depth;
        cfg.min_child_weight = mcw;
        cfg.pos_weight = pw;
        cfg.n_trees = j.value("n_trees", 50);
        cfg.learning_rate = j.value("learning_rate", 0.1);
        cfg.lambda = j.value("lambda", defaults.lambda);
        cfg.gamma = j.value("gamma", defaults.gamma);
        out.push_back(cfg);
      }
    }
  }
  return out;
}

void require(const fs::path& path, const char* stage) {
  if (!fs::exists(path)) {
    throw StageError(stage, "missing " + path.string() + " (run '" + stage + "' first)");
  }
}

std::vector<ConversationTriple> load_split(const PipelineConfig& c, std::string_view split) {
  const fs::path p = artifact::triples(c, split);
  require(p, "ingest");
  return read_triples(p);
}

std::vector<CandidateRow> load_features(const PipelineConfig& c, std::string_view split) {
  const fs::path p = artifact::features(c, split);
  require(p, "featurize");
  return read_feature_csv(p);
}

Taxonomy load_taxonomy(const PipelineConfig& c) {
  return c.taxonomy ? Taxonomy::load(*c.taxonomy) : Taxonomy::standard();
}

std::vector<AnnotatedTriple> annotate_split(const PipelineConfig& c, const Annotator& annotator,
                                            std::string_view split) {
  const std::vector<ConversationTriple> triples = load_split(c, split);
  return annotate_triples(triples, annotator);
}

void log(const std::string& msg) { fmt::print(stderr, "echotrace: {}\n", msg); }

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& root) {
  try {
    PipelineConfig c;
    c.work_dir = resolve(root, j.value("work_dir", std::string("work")));
    for (const auto& d : j.value("dumps", std::vector<std::string>{})) {
      c.dumps.push_back(resolve(root, d));
    }
    if (j.contains("annotation")) {
      const json& a = j.at("annotation");
      const std::string mode = a.value("mode", std::string("builtin"));
      if (mode == "builtin") {
        c.annotation = AnnotationMode::kBuiltin;
      } else if (mode == "exchange") {
        c.annotation = AnnotationMode::kExchange;
        c.exchange_path = resolve(root, a.at("path").get<std::string>());
      } else {
        throw SchemaError("annotation.mode must be 'builtin' or 'exchange'");
      }
    }
    if (j.contains("taxonomy")) c.taxonomy = resolve(root, j.at("taxonomy").get<std::string>());
    if (j.contains("split")) {
      c.test_months = j.at("split").value("test_months", c.test_months);
      c.validation_months = j.at("split").value("validation_months", c.validation_months);
    }
    if (j.contains("features")) c.js_distance = j.at("features").value("js_distance", false);
    if (j.contains("model")) {
      const json& m = j.at("model");
      c.model = parse_model_kind(m.value("kind", std::string("gbt")));
      c.threshold = m.value("threshold", c.threshold);
      if (m.contains("logreg_grid")) c.logreg_grid = logreg_grid_from_json(m.at("logreg_grid"));
      if (m.contains("gbt_grid")) c.gbt_grid = gbt_grid_from_json(m.at("gbt_grid"));
    }
    if (j.contains("evaluate")) {
      const json& e = j.at("evaluate");
      c.random_p = e.value("random_p", c.random_p);
      c.run_ablation = e.value("ablation", c.run_ablation);
      c.ablation_groups = e.value("ablation_groups", c.ablation_groups);
    }
    c.seed = j.value("seed", c.seed);
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("bad config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config not found: " + path.string());
  fs::path root = fs::absolute(path).parent_path();
  if (const char* env = std::getenv("ECHOTRACE_DATA_DIR"); env && *env) root = env;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return from_json(j, root);
}

namespace artifact {
fs::path triples(const PipelineConfig& c, std::string_view split) {
  return c.work_dir / fmt::format("triples.{}.jsonl", split);
}
fs::path requests(const PipelineConfig& c) { return c.work_dir / "docs.jsonl"; }
fs::path ingest_report(const PipelineConfig& c) { return c.work_dir / "ingest_report.json"; }
fs::path stats(const PipelineConfig& c) { return c.work_dir / "stats.json"; }
fs::path features(const PipelineConfig& c, std::string_view split) {
  return c.work_dir / fmt::format("features.{}.csv", split);
}
fs::path model(const PipelineConfig& c) { return c.work_dir / "model.json"; }
fs::path train_report(const PipelineConfig& c) { return c.work_dir / "train_report.json"; }
fs::path report(const PipelineConfig& c) { return c.work_dir / "report.json"; }
fs::path significance(const PipelineConfig& c) { return c.work_dir / "significance.csv"; }
fs::path decile_curve(const PipelineConfig& c) { return c.work_dir / "decile_curve.csv"; }
fs::path decile_curve_pc(const PipelineConfig& c) {
  return c.work_dir / "decile_curve_pc_from_op.csv";
}
fs::path descriptives(const PipelineConfig& c) { return c.work_dir / "descriptives.json"; }
fs::path augmented(const PipelineConfig& c, std::string_view split) {
  return c.work_dir / fmt::format("augmented.{}.jsonl", split);
}
}  // namespace artifact

std::unique_ptr<Annotator> make_annotator(const PipelineConfig& config) {
  if (config.annotation == AnnotationMode::kBuiltin) return std::make_unique<BuiltinAnnotator>();
  if (!fs::exists(config.exchange_path)) {
    throw StageError("annotate", "missing exchange file " + config.exchange_path.string() +
                                     " (run the annotation adapter over docs.jsonl)");
  }
  return std::make_unique<ExchangeAnnotator>(ExchangeAnnotator::load(config.exchange_path));
}

void run_ingest(const PipelineConfig& config) {
  if (config.dumps.empty()) throw StageError("ingest", "config lists no dumps");
  for (const auto& d : config.dumps) {
    if (!fs::exists(d)) throw StageError("ingest", "missing dump " + d.string());
  }
  const Dump dump = load_dumps(config.dumps);
  Extraction ex = extract_triples(dump.submissions, dump.comments);
  const std::size_t n_triples = ex.triples.size();
  SplitCorpus split = split_by_time(std::move(ex.triples), config.test_months,
                                    config.validation_months);
  for (const auto& w : split.warnings) log("warning: " + w);

  fs::create_directories(config.work_dir);
  write_triples(artifact::triples(config, "train"), split.train);
  write_triples(artifact::triples(config, "validation"), split.validation);
  write_triples(artifact::triples(config, "test"), split.test);
  std::vector<ConversationTriple> all;
  for (auto* part : {&split.train, &split.validation, &split.test}) {
    all.insert(all.end(), part->begin(), part->end());
  }
  write_annotation_requests(artifact::requests(config), all);

  const json report{{"submissions", dump.submissions.size()},
                    {"comments", dump.comments.size()},
                    {"skipped_lines", dump.skipped_lines},
                    {"triples", n_triples},
                    {"dangling_parents", ex.report.dangling_parents},
                    {"deleted_dropped", ex.report.deleted_dropped},
                    {"multi_explanation_pcs", ex.report.multi_explanation_pcs},
                    {"split_sizes",
                     {{"train", split.train.size()},
                      {"validation", split.validation.size()},
                      {"test", split.test.size()}}},
                    {"warnings", split.warnings}};
  write_file_atomic(artifact::ingest_report(config), report.dump(1) + "\n");
  log(fmt::format("ingest: {} triples (train {}, validation {}, test {})", n_triples,
                  split.train.size(), split.validation.size(), split.test.size()));
}

void run_featurize(const PipelineConfig& config) {
  for (std::string_view s : kSplits) require(artifact::triples(config, s), "ingest");
  const std::unique_ptr<Annotator> annotator = make_annotator(config);
  const std::vector<AnnotatedTriple> train = annotate_split(config, *annotator, "train");
  const CorpusStats stats = build_corpus_stats(train);
  stats.save(artifact::stats(config));
  const FeatureOptions options{config.js_distance};
  const Taxonomy taxonomy = load_taxonomy(config);
  for (std::string_view s : kSplits) {
    const std::vector<AnnotatedTriple> triples =
        s == "train" ? train : annotate_split(config, *annotator, s);
    const FeaturizeResult r = featurize_triples(triples, stats, taxonomy, options);
    if (r.empty_triples) {
      log(fmt::format("warning: {} {} triples have an empty OP and PC", r.empty_triples, s));
    }
    write_feature_csv(artifact::features(config, s), r.rows);
    log(fmt::format("featurize: {} rows for {}", r.rows.size(), s));
  }
}

void run_train(const PipelineConfig& config) {
  const std::vector<CandidateRow> train = load_features(config, "train");
  const std::vector<CandidateRow> validation = load_features(config, "validation");
  const GridSpec grid{config.logreg_grid, config.gbt_grid};
  const GridResult result = grid_search(config.model, train, validation, grid,
                                        all_feature_indices(), config.threshold);
  result.model.save(artifact::model(config));

  json points = json::array();
  for (const GridPoint& p : result.points) {
    points.push_back({{"config", p.config}, {"validation_f1", p.validation_f1}});
  }
  json report{{"kind", model_kind_name(config.model)},
              {"best", result.best},
              {"grid", std::move(points)}};
  if (config.model == ModelKind::kGbt) {
    const std::vector<double> importance = feature_importance(result.model.gbt);
    json imp = json::object();
    for (std::size_t j = 0; j < importance.size(); ++j) {
      imp[feature_names()[result.model.features[j]]] = importance[j];
    }
    report["feature_importance"] = std::move(imp);
  }
  write_file_atomic(artifact::train_report(config), report.dump(1) + "\n");
  log(fmt::format("train: best validation F1 {:.4f} at grid point {}",
                  result.points[result.best].validation_f1, result.best));
}

void run_evaluate(const PipelineConfig& config) {
  require(artifact::model(config), "train");
  const TrainedModel model = TrainedModel::load(artifact::model(config));
  const std::vector<CandidateRow> test = load_features(config, "test");
  const EvalReport report = evaluate(model, test, config.seed, config.random_p);
  json out{{"model", model_kind_name(model.kind)},
           {"seed", config.seed},
           {"threshold", model.threshold},
           {"test_rows", test.size()},
           {"report", report.to_json()}};
  if (config.run_ablation) {
    const std::vector<CandidateRow> train = load_features(config, "train");
    const std::vector<CandidateRow> validation = load_features(config, "validation");
    const GridSpec grid{config.logreg_grid, config.gbt_grid};
    out["ablation"] = ablation(config.model, train, validation, test, grid,
                               config.ablation_groups, config.threshold)
                          .to_json();
  }
  write_file_atomic(artifact::report(config), out.dump(1) + "\n");
  const auto f1 = [](const SubsetScore& s) { return s.f1 ? fmt::format("{:.3f}", *s.f1) : "n/a"; };
  log(fmt::format("evaluate: F1 all {} content {} stop {} (random {} / {} / {})", f1(report.all),
                  f1(report.content), f1(report.stop), f1(report.random_all),
                  f1(report.random_content), f1(report.random_stop)));
}

void run_stats(const PipelineConfig& config) {
  require(artifact::stats(config), "featurize");
  const CorpusStats stats = CorpusStats::load(artifact::stats(config));
  const std::vector<CandidateRow> train_rows = load_features(config, "train");
  const std::unique_ptr<Annotator> annotator = make_annotator(config);
  const std::vector<AnnotatedTriple> train = annotate_split(config, *annotator, "train");

  write_file_atomic(artifact::descriptives(config),
                    corpus_descriptives(train).to_json().dump(1) + "\n");
  const DecileCurve curve = echo_prob_by_df_decile(df_labels(train_rows, stats));
  for (const auto& w : curve.warnings) log("warning: " + w);
  write_decile_csv(artifact::decile_curve(config), curve);
  write_decile_csv(artifact::decile_curve_pc(config),
                   echo_prob_by_df_decile(pc_from_op_labels(train, stats)));
  write_significance_csv(artifact::significance(config), significance_tests(train_rows));
  log(fmt::format("stats: {} training triples, {} candidate rows", train.size(), train_rows.size()));
}

void run_export_augmented(const PipelineConfig& config) {
  require(artifact::stats(config), "featurize");
  const CorpusStats stats = CorpusStats::load(artifact::stats(config));
  const std::vector<CandidateRow> train_rows = load_features(config, "train");
  const MinMaxScaler scaler = MinMaxScaler::fit(train_rows);
  const std::unique_ptr<Annotator> annotator = make_annotator(config);
  const Taxonomy taxonomy = load_taxonomy(config);
  const FeatureOptions options{config.js_distance};

  for (std::string_view s : kSplits) {
    std::string out;
    for (const AnnotatedTriple& t : annotate_split(config, *annotator, s)) {
      std::unordered_map<std::string, const CandidateRow*> by_stem;
      const std::vector<CandidateRow> rows = featurize_triple(t, stats, taxonomy, options);
      for (const CandidateRow& r : rows) by_stem.emplace(r.stem, &r);
      json tokens = json::array();
      auto emit = [&](const AnnotatedDoc& doc, const char* side) {
        for (const Token& tok : doc.tokens) {
          const CandidateRow& r = *by_stem.at(tok.stem);
          const FeatureVector scaled = scaler.transform(r.features);
          tokens.push_back({{"text", tok.surface},
                            {"stem", tok.stem},
                            {"side", side},
                            {"label", r.label},
                            {"features", scaled}});
        }
      };
      emit(t.op, "op");
      FeatureVector zeros{};
      tokens.push_back(
          {{"text", "<sep>"}, {"stem", ""}, {"side", "sep"}, {"label", 0}, {"features", zeros}});
      emit(t.pc, "pc");
      out += json{{"triple_id", t.triple_id}, {"tokens", std::move(tokens)}}.dump();
      out.push_back('\n');
    }
    write_file_atomic(artifact::augmented(config, s), out);
  }
  log("export-augmented: wrote token streams for all splits");
}

}  // namespace echotrace
