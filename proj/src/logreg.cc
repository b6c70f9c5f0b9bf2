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

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "echotrace/learn.h"

namespace echotrace {
namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H * g.
std::vector<double> lbfgs_direction(const std::deque<Pair>& memory, const std::vector<double>& g) {
  std::vector<double> q = g;
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    alpha[k] = memory[k].rho * dot(memory[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * memory[k].y[i];
  }
  if (!memory.empty()) {
    const Pair& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const double beta = memory[k].rho * dot(memory[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += memory[k].s[i] * (alpha[k] - beta);
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogRegModel::predict_proba(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("logreg: feature count mismatch");
  return sigmoid(dot(weights, x) + bias);
}

double logreg_objective(const Matrix& x, std::span<const int> y, const LogRegConfig& config,
                        std::span<const double> params, std::vector<double>* grad) {
  const std::size_t d = x.cols();
  if (params.size() != d + 1) throw std::invalid_argument("logreg: parameter count mismatch");
  if (y.size() != x.rows()) throw std::invalid_argument("logreg: label count mismatch");
  const std::span<const double> w = params.first(d);
  const double b = params[d];
  if (grad) grad->assign(d + 1, 0.0);
  double loss = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double z = dot(w, row) + b;
    const double weight = y[i] ? config.pos_weight : config.neg_weight;
    loss += weight * (softplus(z) - (y[i] ? z : 0.0));
    if (grad) {
      const double r = weight * (sigmoid(z) - y[i]);
      for (std::size_t j = 0; j < d; ++j) (*grad)[j] += r * row[j];
      (*grad)[d] += r;
    }
  }
  const double inv_c = 1.0 / config.c;
  loss += 0.5 * inv_c * dot(w, w);
  if (grad) {
    for (std::size_t j = 0; j < d; ++j) (*grad)[j] += inv_c * w[j];
  }
  return loss;
}

LogRegModel train_logreg(const Matrix& x, std::span<const int> y, const LogRegConfig& config,
                         LogRegTrace* trace) {
  if (y.size() != x.rows()) throw std::invalid_argument("logreg: label count mismatch");
  bool has_pos = false;
  bool has_neg = false;
  for (int v : y) (v ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw std::invalid_argument("logreg: labels hold a single class");
  if (!(config.c > 0)) throw std::invalid_argument("logreg: C must be positive");

  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  // Relative decrease below which f is flat at double precision.
  constexpr double kFlat = 64 * std::numeric_limits<double>::epsilon();
  const std::size_t n = x.cols() + 1;
  std::vector<double> params(n, 0.0);
  std::vector<double> grad;
  double f = logreg_objective(x, y, config, params, &grad);
  std::deque<Pair> memory;
  LogRegTrace local;
  local.objective.push_back(f);

  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    const double gnorm = norm(grad);
    if (gnorm < config.tolerance) {
      local.converged = true;
      break;
    }
    std::vector<double> dir = lbfgs_direction(memory, grad);
    double slope = dot(dir, grad);
    if (!(slope < 0)) {
      memory.clear();
      dir = grad;
      for (double& v : dir) v = -v;
      slope = -gnorm * gnorm;
    }
    double step = memory.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    std::vector<double> next(n);
    std::vector<double> next_grad;
    double next_f = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n; ++i) next[i] = params[i] + step * dir[i];
      next_f = logreg_objective(x, y, config, next, &next_grad);
      if (next_f <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      // No descent is possible at machine precision.
      local.converged = true;
      break;
    }
    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = next[i] - params[i];
      p.y[i] = next_grad[i] - grad[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (memory.size() > kMemory) memory.pop_front();
    }
    const bool flat = f - next_f <= kFlat * std::max({std::fabs(f), std::fabs(next_f), 1.0});
    params.swap(next);
    grad.swap(next_grad);
    f = next_f;
    local.objective.push_back(f);
    if (flat) {
      local.converged = true;
      ++iter;
      break;
    }
  }
  local.iterations = iter;
  if (trace) *trace = std::move(local);

  LogRegModel model;
  model.weights.assign(params.begin(), params.end() - 1);
  model.bias = params.back();
  model.config = config;
  return model;
}

}  // namespace echotrace
