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

#ifndef ALIGN_AUDIT_DECISION_TREE_HPP_
#define ALIGN_AUDIT_DECISION_TREE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "align_audit/types.hpp"

namespace align_audit {

struct TreeConfig {
  int max_depth = 5;
  std::size_t min_samples_split = 15;
  std::size_t min_samples_leaf = 10;
  // Accepted for configuration parity only: induction is deterministic and
  // never consumes randomness.
  std::uint64_t seed = 42;

  void validate() const;
};

// Shannon entropy in bits of a two-class count vector. 0 log 0 is 0.
double entropy(std::size_t negatives, std::size_t positives);

struct TreeNode {
  // -1 for leaves.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int depth = 0;
  std::size_t n_node = 0;
  // Training rows with y = 0 and y = 1.
  std::array<std::size_t, 2> counts{0, 0};
  double impurity = 0.0;
  // Information gain of the split; 0 for leaves.
  double gain = 0.0;
  // Fraction of positive training rows.
  double probability = 0.0;

  bool is_leaf() const { return feature < 0; }
};

// Binary classification tree grown greedily on the entropy criterion.
class TreeModel {
 public:
  TreeModel(std::vector<TreeNode> nodes, std::size_t n_features);

  // Leaf probability of y = 1 for each row. Rows go left when
  // value <= threshold.
  std::vector<double> predict_proba(const Matrix& rows) const;
  // 1 iff the leaf probability is >= 0.5.
  std::vector<int> predict(const Matrix& rows) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_features() const { return n_features_; }
  int depth() const;
  std::size_t leaf_count() const;

 private:
  const TreeNode& leaf_for(const double* row) const;

  std::vector<TreeNode> nodes_;
  std::size_t n_features_;
};

// Candidate thresholds are midpoints between consecutive distinct values.
// The split with the largest information gain wins; ties go to the lowest
// feature index and then the lowest threshold. A node becomes a leaf at
// max_depth, when it is pure, when it has fewer than min_samples_split rows,
// or when no split leaves min_samples_leaf rows on both sides.
TreeModel fit_tree(const Dataset& train, const TreeConfig& config = {});

// Impurity decrease per feature, sum over its splits of
// (n_node / n_root) * gain, normalized to sum 1. All zeros for a single leaf.
ImportanceVector tree_importances(const TreeModel& model);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_DECISION_TREE_HPP_
