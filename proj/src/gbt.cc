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
#include <numeric>
#include <stdexcept>

#include "echotrace/learn.h"

namespace echotrace {
namespace {

constexpr double kMinGain = 1e-6;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Node being grown on the current level.
struct Open {
  int node = -1;
  double g = 0.0;
  double h = 0.0;
  Split best;
  // Scan state for the feature being processed.
  double gl = 0.0;
  double hl = 0.0;
  double last = 0.0;
  bool started = false;
};

double score(double g, double h, double lambda) { return g * g / (h + lambda); }

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2;
  return m > a ? m : b;
}

double weighted_logloss(std::span<const double> margin, std::span<const int> y,
                        double pos_weight) {
  double loss = 0;
  double total = 0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const double w = y[i] ? pos_weight : 1.0;
    const double z = margin[i];
    const double sp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += w * (sp - (y[i] ? z : 0.0));
    total += w;
  }
  return loss / total;
}

Tree grow_tree(const Matrix& x, const std::vector<std::vector<std::uint32_t>>& order,
               std::span<const double> g, std::span<const double> h, const GbtConfig& config) {
  const std::size_t n = x.rows();
  Tree tree;
  tree.nodes.emplace_back();
  std::vector<int> node_of(n, 0);
  std::vector<Open> open(1);
  open[0].node = 0;
  for (std::size_t i = 0; i < n; ++i) {
    open[0].g += g[i];
    open[0].h += h[i];
  }
  // Maps a tree node id to its slot in `open`, or -1 once it is final.
  std::vector<int> slot(1, 0);

  for (int depth = 0; depth < config.max_depth && !open.empty(); ++depth) {
    for (std::size_t f = 0; f < x.cols(); ++f) {
      for (Open& o : open) {
        o.gl = o.hl = 0;
        o.started = false;
      }
      for (std::uint32_t i : order[f]) {
        const int s = slot[node_of[i]];
        if (s < 0) continue;
        Open& o = open[s];
        const double v = x(i, f);
        if (o.started && v != o.last) {
          const double hr = o.h - o.hl;
          if (o.hl >= config.min_child_weight && hr >= config.min_child_weight) {
            const double gain = score(o.gl, o.hl, config.lambda) +
                                score(o.g - o.gl, hr, config.lambda) -
                                score(o.g, o.h, config.lambda) - config.gamma;
            if (gain > kMinGain && gain > o.best.gain) {
              o.best = Split{static_cast<int>(f), midpoint(o.last, v), gain};
            }
          }
        }
        o.gl += g[i];
        o.hl += h[i];
        o.last = v;
        o.started = true;
      }
    }

    std::vector<Open> next;
    for (const Open& o : open) {
      slot[o.node] = -1;
      if (o.best.feature < 0) continue;
      TreeNode& parent = tree.nodes[o.node];
      parent.feature = o.best.feature;
      parent.threshold = o.best.threshold;
      parent.gain = o.best.gain;
      for (int side = 0; side < 2; ++side) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        (side == 0 ? tree.nodes[o.node].left : tree.nodes[o.node].right) = id;
        Open child;
        child.node = id;
        slot.push_back(static_cast<int>(next.size()));
        next.push_back(child);
      }
    }
    if (next.empty()) break;
    for (std::size_t i = 0; i < n; ++i) {
      const TreeNode& node = tree.nodes[node_of[i]];
      if (node.leaf()) continue;
      if (slot[node.left] < 0) continue;  // split made on an earlier level
      const int child = x(i, node.feature) < node.threshold ? node.left : node.right;
      node_of[i] = child;
      Open& o = next[slot[child]];
      o.g += g[i];
      o.h += h[i];
    }
    open = std::move(next);
  }

  std::vector<double> gs(tree.nodes.size(), 0.0);
  std::vector<double> hs(tree.nodes.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    gs[node_of[i]] += g[i];
    hs[node_of[i]] += h[i];
  }
  // Covers of internal nodes are the sums of their leaves; fill bottom-up.
  for (std::size_t k = tree.nodes.size(); k-- > 0;) {
    TreeNode& node = tree.nodes[k];
    if (node.leaf()) {
      node.value = -gs[k] / (hs[k] + config.lambda);
      node.cover = hs[k];
    } else {
      node.cover = tree.nodes[node.left].cover + tree.nodes[node.right].cover;
    }
  }
  return tree;
}

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::size_t k = 0;
  while (!nodes[k].leaf()) {
    k = x[nodes[k].feature] < nodes[k].threshold ? nodes[k].left : nodes[k].right;
  }
  return nodes[k].value;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].leaf()) continue;
    d[nodes[k].left] = d[nodes[k].right] = d[k] + 1;
    best = std::max(best, d[k] + 1);
  }
  return best;
}

double GbtModel::margin(std::span<const double> x) const {
  if (x.size() != n_features) throw std::invalid_argument("gbt: feature count mismatch");
  double sum = 0;
  for (const Tree& t : trees) sum += t.predict(x);
  return base_score + config.learning_rate * sum;
}

double GbtModel::predict_proba(std::span<const double> x) const { return sigmoid(margin(x)); }

GbtModel train_gbt(const Matrix& x, std::span<const int> y, const GbtConfig& config,
                   GbtTrace* trace) {
  if (config.n_trees <= 0) throw std::invalid_argument("gbt: n_trees must be positive");
  if (config.max_depth <= 0) throw std::invalid_argument("gbt: max_depth must be positive");
  if (y.size() != x.rows()) throw std::invalid_argument("gbt: label count mismatch");
  if (x.rows() == 0) throw std::invalid_argument("gbt: no training rows");
  const std::size_t n = x.rows();

  double pos = 0;
  double neg = 0;
  for (int v : y) (v ? pos : neg) += 1;
  GbtModel model;
  model.config = config;
  model.n_features = x.cols();
  if (pos > 0 && neg > 0) model.base_score = std::log(config.pos_weight * pos / neg);

  std::vector<std::vector<std::uint32_t>> order(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    order[f].resize(n);
    std::iota(order[f].begin(), order[f].end(), 0u);
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<double> margin(n, model.base_score);
  std::vector<double> g(n);
  std::vector<double> h(n);
  if (trace) {
    trace->weighted_logloss.clear();
    trace->weighted_logloss.push_back(weighted_logloss(margin, y, config.pos_weight));
  }
  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      const double w = y[i] ? config.pos_weight : 1.0;
      g[i] = w * (p - y[i]);
      h[i] = w * std::max(p * (1 - p), 1e-16);
    }
    Tree tree = grow_tree(x, order, g, h, config);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += config.learning_rate * tree.predict(x.row(i));
    }
    model.trees.push_back(std::move(tree));
    if (trace) trace->weighted_logloss.push_back(weighted_logloss(margin, y, config.pos_weight));
  }
  return model;
}

std::vector<double> feature_importance(const GbtModel& model) {
  std::vector<double> gain(model.n_features, 0.0);
  for (const Tree& t : model.trees) {
    for (const TreeNode& node : t.nodes) {
      if (!node.leaf()) gain[node.feature] += node.gain;
    }
  }
  const double total = std::accumulate(gain.begin(), gain.end(), 0.0);
  if (total > 0) {
    for (double& v : gain) v = 100.0 * v / total;
  }
  return gain;
}

}  // namespace echotrace
