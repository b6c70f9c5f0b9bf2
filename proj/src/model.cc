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

#include <numeric>
#include <random>
#include <stdexcept>

#include "echotrace/error.h"
#include "echotrace/io.h"
#include "echotrace/learn.h"
#include "echotrace/metrics.h"

namespace echotrace {
namespace {

using nlohmann::json;

json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const TreeNode& n : t.nodes) {
    if (n.leaf()) {
      nodes.push_back({{"leaf", n.value}, {"cover", n.cover}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"gain", n.gain},
                       {"cover", n.cover}});
    }
  }
  return nodes;
}

Tree tree_from_json(const json& j, std::size_t n_features) {
  Tree t;
  for (const json& n : j) {
    TreeNode node;
    node.cover = n.at("cover").get<double>();
    if (n.contains("leaf")) {
      node.value = n.at("leaf").get<double>();
    } else {
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
      node.gain = n.at("gain").get<double>();
    }
    t.nodes.push_back(node);
  }
  const int size = static_cast<int>(t.nodes.size());
  for (const TreeNode& n : t.nodes) {
    if (n.leaf()) continue;
    if (n.feature >= static_cast<int>(n_features) || n.left <= 0 || n.right <= 0 ||
        n.left >= size || n.right >= size) {
      throw SchemaError("tree node references out of range");
    }
  }
  if (t.nodes.empty()) throw SchemaError("empty tree");
  return t;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kLogReg ? "logreg" : "gbt";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logreg") return ModelKind::kLogReg;
  if (name == "gbt") return ModelKind::kGbt;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

json config_to_json(const LogRegConfig& c) {
  return json{{"C", c.c},
              {"class_weights", {c.neg_weight, c.pos_weight}},
              {"max_iter", c.max_iter},
              {"tolerance", c.tolerance}};
}

json config_to_json(const GbtConfig& c) {
  return json{{"max_depth", c.max_depth},           {"min_child_weight", c.min_child_weight},
              {"pos_weight", c.pos_weight},         {"n_trees", c.n_trees},
              {"learning_rate", c.learning_rate},   {"lambda", c.lambda},
              {"gamma", c.gamma}};
}

LogRegConfig logreg_config_from_json(const json& j) {
  LogRegConfig c;
  c.c = j.value("C", c.c);
  if (j.contains("class_weights")) {
    const auto w = j.at("class_weights").get<std::vector<double>>();
    if (w.size() != 2) throw SchemaError("class_weights needs two entries");
    c.neg_weight = w[0];
    c.pos_weight = w[1];
  }
  c.max_iter = j.value("max_iter", c.max_iter);
  c.tolerance = j.value("tolerance", c.tolerance);
  return c;
}

GbtConfig gbt_config_from_json(const json& j) {
  GbtConfig c;
  c.max_depth = j.value("max_depth", c.max_depth);
  c.min_child_weight = j.value("min_child_weight", c.min_child_weight);
  c.pos_weight = j.value("pos_weight", c.pos_weight);
  c.n_trees = j.value("n_trees", c.n_trees);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.lambda = j.value("lambda", c.lambda);
  c.gamma = j.value("gamma", c.gamma);
  return c;
}

std::vector<std::size_t> all_feature_indices() {
  std::vector<std::size_t> out(kNumFeatures);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

Matrix design_matrix(std::span<const CandidateRow> rows, const MinMaxScaler& scaler,
                     std::span<const std::size_t> features) {
  Matrix m(rows.size(), features.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      m(i, j) = scaler.transform(features[j], rows[i].features[features[j]]);
    }
  }
  return m;
}

std::vector<int> labels_of(std::span<const CandidateRow> rows) {
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = rows[i].label;
  return y;
}

double TrainedModel::predict_proba(const FeatureVector& raw) const {
  std::vector<double> x(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    x[j] = scaler.transform(features[j], raw[features[j]]);
  }
  return kind == ModelKind::kLogReg ? logreg.predict_proba(x) : gbt.predict_proba(x);
}

int TrainedModel::predict(const FeatureVector& raw) const {
  return predict_proba(raw) >= threshold ? 1 : 0;
}

std::vector<int> TrainedModel::predict(std::span<const CandidateRow> rows) const {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict(rows[i].features);
  return out;
}

json TrainedModel::to_json() const {
  json j{{"schema_version", kModelSchemaVersion},
         {"kind", model_kind_name(kind)},
         {"threshold", threshold},
         {"features", features},
         {"scaler", scaler.to_json()}};
  if (kind == ModelKind::kLogReg) {
    j["config"] = config_to_json(logreg.config);
    j["weights"] = logreg.weights;
    j["bias"] = logreg.bias;
  } else {
    j["config"] = config_to_json(gbt.config);
    j["base_score"] = gbt.base_score;
    json trees = json::array();
    for (const Tree& t : gbt.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
  }
  return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
      throw SchemaError("unsupported model schema version");
    }
    TrainedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.threshold = j.at("threshold").get<double>();
    m.features = j.at("features").get<std::vector<std::size_t>>();
    for (std::size_t f : m.features) {
      if (f >= kNumFeatures) throw SchemaError("feature index out of range");
    }
    m.scaler = MinMaxScaler::from_json(j.at("scaler"));
    if (m.scaler.min().size() != kNumFeatures) throw SchemaError("scaler must cover 66 features");
    if (m.kind == ModelKind::kLogReg) {
      m.logreg.config = logreg_config_from_json(j.at("config"));
      m.logreg.weights = j.at("weights").get<std::vector<double>>();
      m.logreg.bias = j.at("bias").get<double>();
      if (m.logreg.weights.size() != m.features.size()) throw SchemaError("weight count mismatch");
    } else {
      m.gbt.config = gbt_config_from_json(j.at("config"));
      m.gbt.base_score = j.at("base_score").get<double>();
      m.gbt.n_features = m.features.size();
      for (const json& t : j.at("trees")) m.gbt.trees.push_back(tree_from_json(t, m.features.size()));
    }
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("bad model: ") + e.what());
  }
}

void TrainedModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump() + "\n");
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::vector<int> random_baseline(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("random_baseline: p outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<int> out(n);
  for (int& v : out) v = coin(rng) ? 1 : 0;
  return out;
}

std::vector<LogRegConfig> GridSpec::default_logreg() {
  std::vector<LogRegConfig> out;
  for (double c : {0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    for (auto [neg, pos] : {std::pair{0.25, 0.75}, std::pair{0.20, 0.80}, std::pair{0.15, 0.85}}) {
      LogRegConfig cfg;
      cfg.c = c;
      cfg.neg_weight = neg;
      cfg.pos_weight = pos;
      out.push_back(cfg);
    }
  }
  return out;
}

std::vector<GbtConfig> GridSpec::default_gbt(int n_trees, double learning_rate) {
  std::vector<GbtConfig> out;
  for (int depth : {5, 7, 9}) {
    for (double mcw : {3.0, 5.0, 7.0}) {
      for (double pw : {3.0, 4.0, 5.0}) {
        GbtConfig cfg;
        cfg.max_depth = depth;
        cfg.min_child_weight = mcw;
        cfg.pos_weight = pw;
        cfg.n_trees = n_trees;
        cfg.learning_rate = learning_rate;
        out.push_back(cfg);
      }
    }
  }
  return out;
}

GridResult grid_search(ModelKind kind, std::span<const CandidateRow> train,
                       std::span<const CandidateRow> validation, const GridSpec& grid,
                       std::span<const std::size_t> features, double threshold) {
  const std::size_t size = kind == ModelKind::kLogReg ? grid.logreg.size() : grid.gbt.size();
  if (size == 0) throw std::invalid_argument("grid_search: empty grid");
  if (train.empty()) throw std::invalid_argument("grid_search: no training rows");
  if (validation.empty()) throw std::invalid_argument("grid_search: no validation rows");
  if (features.empty()) throw std::invalid_argument("grid_search: no features selected");

  TrainedModel base;
  base.kind = kind;
  base.features.assign(features.begin(), features.end());
  base.scaler = MinMaxScaler::fit(train);
  base.threshold = threshold;
  const Matrix x = design_matrix(train, base.scaler, features);
  const std::vector<int> y = labels_of(train);
  const std::vector<int> y_val = labels_of(validation);

  GridResult result;
  double best_f1 = -1;
  for (std::size_t k = 0; k < size; ++k) {
    TrainedModel m = base;
    GridPoint point;
    if (kind == ModelKind::kLogReg) {
      m.logreg = train_logreg(x, y, grid.logreg[k]);
      point.config = config_to_json(grid.logreg[k]);
    } else {
      m.gbt = train_gbt(x, y, grid.gbt[k]);
      point.config = config_to_json(grid.gbt[k]);
    }
    point.validation_f1 = f1_score(m.predict(validation), y_val);
    if (point.validation_f1 > best_f1) {
      best_f1 = point.validation_f1;
      result.best = k;
      result.model = std::move(m);
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace echotrace
