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

#ifndef ECHOTRACE_LEARN_H_
#define ECHOTRACE_LEARN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "echotrace/features.h"

namespace echotrace {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double sigmoid(double z);

// ---- Logistic regression ----

struct LogRegConfig {
  double c = 1.0;  // inverse L2 strength
  double neg_weight = 0.25;
  double pos_weight = 0.75;
  int max_iter = 1000;
  double tolerance = 1e-6;  // on the gradient norm
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogRegConfig config;

  double predict_proba(std::span<const double> x) const;
};

// Class-weighted negative log-likelihood plus (1/(2C))|w|^2; the bias is not
// penalized. `params` holds the weights followed by the bias. When `grad` is
// non-null it receives the gradient in the same layout.
double logreg_objective(const Matrix& x, std::span<const int> y, const LogRegConfig& config,
                        std::span<const double> params, std::vector<double>* grad);

struct LogRegTrace {
  std::vector<double> objective;  // one entry per accepted iterate, starting at zero
  int iterations = 0;
  bool converged = false;
};

// L-BFGS with a backtracking (Armijo) line search from all-zero parameters.
// Throws std::invalid_argument when y holds a single class.
LogRegModel train_logreg(const Matrix& x, std::span<const int> y, const LogRegConfig& config,
                         LogRegTrace* trace = nullptr);

// ---- Gradient-boosted trees ----

struct GbtConfig {
  int max_depth = 6;
  double min_child_weight = 1.0;
  double pos_weight = 1.0;
  int n_trees = 50;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // x < threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
  double gain = 0.0;  // split gain, 0 for leaves
  double cover = 0.0;  // hessian sum

  bool leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  int depth() const;
};

struct GbtModel {
  std::vector<Tree> trees;
  double base_score = 0.0;  // prior log-odds
  GbtConfig config;
  std::size_t n_features = 0;

  double margin(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;
};

struct GbtTrace {
  // Weighted mean log-loss on the training set: before the first tree, then
  // after each tree.
  std::vector<double> weighted_logloss;
};

// Newton boosting on the logistic loss with exact greedy level-wise splits.
// Positives carry pos_weight on gradient and hessian.
GbtModel train_gbt(const Matrix& x, std::span<const int> y, const GbtConfig& config,
                   GbtTrace* trace = nullptr);

// Total split gain per feature, scaled to sum to 100. All zero if the model
// never split.
std::vector<double> feature_importance(const GbtModel& model);

// ---- Wrapped model ----

enum class ModelKind { kLogReg, kGbt };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

inline constexpr int kModelSchemaVersion = 1;

// A learner plus the scaler and feature subset it was trained with. Inputs to
// predict are raw 66-value vectors.
struct TrainedModel {
  ModelKind kind = ModelKind::kGbt;
  std::vector<std::size_t> features;  // indices into the 66, in column order
  MinMaxScaler scaler;
  double threshold = 0.5;
  LogRegModel logreg;
  GbtModel gbt;

  double predict_proba(const FeatureVector& raw) const;
  int predict(const FeatureVector& raw) const;
  std::vector<int> predict(std::span<const CandidateRow> rows) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
};

std::vector<std::size_t> all_feature_indices();

// Scales rows and keeps the listed columns.
Matrix design_matrix(std::span<const CandidateRow> rows, const MinMaxScaler& scaler,
                     std::span<const std::size_t> features);
std::vector<int> labels_of(std::span<const CandidateRow> rows);

// i.i.d. Bernoulli(p) predictions from a seeded mt19937_64.
std::vector<int> random_baseline(std::size_t n, double p, std::uint64_t seed);

struct GridSpec {
  std::vector<LogRegConfig> logreg;
  std::vector<GbtConfig> gbt;

  // C in {0.1, 1, 10, 100, 1000, 10000} x weights {(.25,.75), (.2,.8), (.15,.85)}.
  static std::vector<LogRegConfig> default_logreg();
  // depth {5,7,9} x min_child_weight {3,5,7} x pos_weight {3,4,5}.
  static std::vector<GbtConfig> default_gbt(int n_trees = 1000, double learning_rate = 0.1);
};

nlohmann::json config_to_json(const LogRegConfig& c);
nlohmann::json config_to_json(const GbtConfig& c);
LogRegConfig logreg_config_from_json(const nlohmann::json& j);
GbtConfig gbt_config_from_json(const nlohmann::json& j);

struct GridPoint {
  nlohmann::json config;
  double validation_f1 = 0.0;
};

struct GridResult {
  TrainedModel model;
  std::vector<GridPoint> points;
  std::size_t best = 0;
};

// Trains one model per grid point on `train` (scaler fitted there), scores F1
// on `validation`, and keeps the best; ties go to the earlier point. Throws
// std::invalid_argument on an empty grid or empty inputs.
GridResult grid_search(ModelKind kind, std::span<const CandidateRow> train,
                       std::span<const CandidateRow> validation, const GridSpec& grid,
                       std::span<const std::size_t> features, double threshold = 0.5);

}  // namespace echotrace

#endif  // ECHOTRACE_LEARN_H_
