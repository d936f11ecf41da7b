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

#ifndef ALIGN_AUDIT_KERNEL_SHAP_HPP_
#define ALIGN_AUDIT_KERNEL_SHAP_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "align_audit/types.hpp"

namespace align_audit {

// Batched model output, one value per row. Must be safe to call concurrently.
using ModelFn = std::function<Vector(const Matrix&)>;

// Feature subset; entry j is true when feature j takes the explained value.
using Coalition = std::vector<bool>;

struct ShapConfig {
  std::size_t background_size = 100;
  // Every coalition is evaluated when the feature count is at most this.
  std::size_t enumeration_limit = 12;
  // Coalition draws per instance above the enumeration limit.
  std::size_t sampled_coalitions = 2048;
  std::uint64_t seed = 42;
  // Worker threads for explain(); 0 picks the hardware concurrency.
  std::size_t threads = 1;

  void validate(std::size_t features) const;
};

// Shapley kernel weight (p - 1) / (C(p, s) s (p - s)) for 1 <= s <= p - 1.
// The empty and full coalitions are handled as constraints instead.
double shapley_kernel_weight(std::size_t p, std::size_t s);

// Seeded uniform draw of min(size, rows) distinct rows.
Matrix sample_background(const Matrix& x, std::size_t size, std::uint64_t seed);

// v(S): mean of f(z) over background rows b, where z takes x on S and b
// elsewhere.
double masked_prediction(const ModelFn& model, const Vector& x, const Coalition& coalition,
                         const Matrix& background);

// v(S) for many coalitions at once, batching model calls.
std::vector<double> coalition_values(const ModelFn& model, const Vector& x,
                                     const std::vector<Coalition>& coalitions,
                                     const Matrix& background);

struct InstanceExplanation {
  Vector phi;
  // v(empty set): the mean background output.
  double base_value = 0.0;
  // f(x), which equals v(full set).
  double output = 0.0;
  // |base_value + sum(phi) - output|.
  double residual = 0.0;
  // True when every coalition was evaluated.
  bool exact = false;
  std::size_t coalitions = 0;
};

// KernelSHAP: weighted least squares of v(S) - v(empty) on the coalition
// indicators with Shapley kernel weights, subject to sum(phi) =
// v(full) - v(empty). The constraint is enforced by eliminating the last
// attribution. All coalitions are used when the feature count is within the
// enumeration limit; otherwise coalitions are drawn with size probability
// proportional to the kernel mass, deduplicated, and weighted by draw count.
// `stream` selects the sampling stream so that instances draw independently.
// Throws TrainingError when the normal equations are singular.
InstanceExplanation explain_instance(const ModelFn& model, const Vector& x,
                                     const Matrix& background, const ShapConfig& config,
                                     std::uint64_t stream = 0);

// Shapley values by direct summation over all subsets,
//   phi_j = sum_{S without j} |S|! (p - |S| - 1)! / p! (v(S + j) - v(S)).
// Limited to p <= 12.
Vector exact_shapley(const ModelFn& model, const Vector& x, const Matrix& background);

struct AttributionMatrix {
  // instances x features.
  Matrix phi;
  double base_value = 0.0;
  Vector outputs;
  std::vector<std::size_t> instance_ids;
  double max_residual = 0.0;
  bool exact = false;
};

// Explains every row of `instances`, fanning out over config.threads.
AttributionMatrix explain(const ModelFn& model, const Matrix& instances,
                          const Matrix& background, const ShapConfig& config,
                          std::vector<std::size_t> instance_ids = {});

// Mean |phi| per feature, normalized to sum 1. All-zero attributions give a
// uniform vector flagged no_signal.
ImportanceVector aggregate_importance(const AttributionMatrix& attributions);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_KERNEL_SHAP_HPP_
