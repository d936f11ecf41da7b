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

#ifndef ALIGN_AUDIT_ALIGNMENT_HPP_
#define ALIGN_AUDIT_ALIGNMENT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "align_audit/effect_size.hpp"
#include "align_audit/ranking.hpp"
#include "align_audit/types.hpp"
#include "json.hpp"

namespace align_audit {

enum class Method { kSmd, kTree, kShap };

// "smd", "tree" or "shap".
std::string_view method_tag(Method method);
// Human-readable axis label.
std::string_view method_label(Method method);

struct Ranking {
  Method method = Method::kSmd;
  std::vector<std::string> features;
  // The magnitudes that were ranked.
  std::vector<double> scores;
  std::vector<double> ranks;
};

Ranking make_ranking(Method method, std::vector<std::string> features,
                     std::vector<double> scores);

// rho > 0.7 is strong, 0.4 < rho <= 0.7 moderate, anything lower weak.
enum class Agreement { kStrong, kModerate, kWeak, kUndefined };

Agreement classify_agreement(std::optional<double> rho);
std::string_view agreement_label(Agreement agreement);

struct Correlation {
  // nullopt when rho is undefined (a constant ranking).
  std::optional<double> rho;
  Agreement agreement = Agreement::kUndefined;
};

struct ModelAccuracy {
  double train = 0.0;
  double test = 0.0;
};

struct AlignmentReport {
  std::string dataset;
  Ranking smd;
  // Signed standardized mean differences, in feature order.
  std::vector<double> smd_delta;
  std::optional<Ranking> tree;
  std::optional<Ranking> shap;
  // Present only when the corresponding model was run.
  std::optional<Correlation> smd_tree;
  std::optional<Correlation> smd_shap;
  std::optional<ModelAccuracy> tree_accuracy;
  std::optional<ModelAccuracy> mlp_accuracy;
  // Echo of the run configuration.
  nlohmann::json config = nlohmann::json::object();

  const std::vector<std::string>& features() const { return smd.features; }
};

struct Accuracies {
  std::optional<ModelAccuracy> tree;
  std::optional<ModelAccuracy> mlp;
};

// Ranks |delta|, tree importances and aggregated |SHAP| and correlates each
// model ranking with the SMD ranking. Importance vectors must be in the
// SMD table's feature order. Throws DataError on a feature-count mismatch.
AlignmentReport build_alignment_report(std::string dataset, const EffectSizeTable& smd,
                                       const std::optional<ImportanceVector>& tree_importance,
                                       const std::optional<ImportanceVector>& shap_importance,
                                       const Accuracies& accuracies,
                                       nlohmann::json config = nlohmann::json::object());

}  // namespace align_audit

#endif  // ALIGN_AUDIT_ALIGNMENT_HPP_
