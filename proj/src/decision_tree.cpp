/*
 * Copyright 2026 The align-audit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "align_audit/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "align_audit/error.hpp"

namespace align_audit {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TreeConfig& config) : data_(data), config_(config) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> rows(data_.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(const std::vector<std::size_t>& rows, int depth) {
    TreeNode node;
    node.depth = depth;
    node.n_node = rows.size();
    for (std::size_t r : rows) ++node.counts[static_cast<std::size_t>(data_.y[r])];
    node.impurity = entropy(node.counts[0], node.counts[1]);
    node.probability =
        static_cast<double>(node.counts[1]) / static_cast<double>(node.n_node);

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    if (depth >= config_.max_depth || pure || rows.size() < config_.min_samples_split)
      return id;
    const Split best = find_split(rows, node);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    const auto col = data_.x.col(best.feature);
    for (std::size_t r : rows) {
      if (col(static_cast<Eigen::Index>(r)) <= best.threshold) {
        left.push_back(r);
      } else {
        right.push_back(r);
      }
    }
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].gain = best.gain;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& rows, const TreeNode& node) const {
    const std::size_t n = rows.size();
    const double n_d = static_cast<double>(n);
    const std::size_t min_leaf = config_.min_samples_leaf;
    Split best;
    std::vector<std::pair<double, int>> values(n);
    for (std::size_t j = 0; j < data_.features(); ++j) {
      const auto col = data_.x.col(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < n; ++i)
        values[i] = {col(static_cast<Eigen::Index>(rows[i])), data_.y[rows[i]]};
      std::sort(values.begin(), values.end());
      std::size_t left_counts[2] = {0, 0};
      for (std::size_t i = 1; i < n; ++i) {
        ++left_counts[values[i - 1].second];
        if (values[i - 1].first == values[i].first) continue;
        if (i < min_leaf || n - i < min_leaf) continue;
        const std::size_t right_counts[2] = {node.counts[0] - left_counts[0],
                                             node.counts[1] - left_counts[1]};
        const double gain = node.impurity -
                            static_cast<double>(i) / n_d * entropy(left_counts[0], left_counts[1]) -
                            static_cast<double>(n - i) / n_d *
                                entropy(right_counts[0], right_counts[1]);
        if (gain > best.gain) {
          const double lo = values[i - 1].first;
          const double hi = values[i].first;
          double threshold = lo + (hi - lo) / 2.0;
          // Adjacent doubles can round the midpoint up onto hi.
          if (threshold >= hi) threshold = lo;
          best = {static_cast<int>(j), threshold, gain};
        }
      }
    }
    // Concavity makes the true gain nonnegative; clear rounding residue.
    if (best.feature >= 0) best.gain = std::max(best.gain, 0.0);
    return best;
  }

  const Dataset& data_;
  const TreeConfig& config_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

void TreeConfig::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
}

double entropy(std::size_t negatives, std::size_t positives) {
  const std::size_t n = negatives + positives;
  if (n == 0) throw DataError("entropy of an empty node");
  double h = 0.0;
  for (std::size_t c : {negatives, positives}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

TreeModel::TreeModel(std::vector<TreeNode> nodes, std::size_t n_features)
    : nodes_(std::move(nodes)), n_features_(n_features) {
  if (nodes_.empty()) throw DataError("tree has no nodes");
}

const TreeNode& TreeModel::leaf_for(const double* row) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(row[node->feature] <= node->threshold ? node->left
                                                                                  : node->right)];
  }
  return *node;
}

std::vector<double> TreeModel::predict_proba(const Matrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != n_features_)
    throw DataError("row width " + std::to_string(rows.cols()) + " does not match the " +
                    std::to_string(n_features_) + " training features");
  std::vector<double> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    out[static_cast<std::size_t>(i)] = leaf_for(rows.row(i).data()).probability;
  return out;
}

std::vector<int> TreeModel::predict(const Matrix& rows) const {
  const auto proba = predict_proba(rows);
  std::vector<int> out(proba.size());
  std::transform(proba.begin(), proba.end(), out.begin(),
                 [](double p) { return p >= 0.5 ? 1 : 0; });
  return out;
}

int TreeModel::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

TreeModel fit_tree(const Dataset& train, const TreeConfig& config) {
  config.validate();
  if (train.rows() == 0) throw DataError("cannot fit a tree on an empty dataset");
  if (train.y.size() != train.rows()) throw DataError("label count does not match rows");
  for (int label : train.y)
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
  return TreeModel(TreeBuilder(train, config).build(), train.features());
}

ImportanceVector tree_importances(const TreeModel& model) {
  ImportanceVector out;
  out.values.assign(model.n_features(), 0.0);
  const double total = static_cast<double>(model.nodes().front().n_node);
  for (const auto& node : model.nodes()) {
    if (node.is_leaf()) continue;
    out.values[static_cast<std::size_t>(node.feature)] +=
        static_cast<double>(node.n_node) / total * node.gain;
  }
  const double sum = std::accumulate(out.values.begin(), out.values.end(), 0.0);
  if (sum > 0.0)
    for (double& v : out.values) v /= sum;
  return out;
}

}  // namespace align_audit
