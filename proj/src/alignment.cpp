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

#include "align_audit/alignment.hpp"

#include "align_audit/error.hpp"

namespace align_audit {

std::string_view method_tag(Method method) {
  switch (method) {
    case Method::kSmd:
      return "smd";
    case Method::kTree:
      return "tree";
    case Method::kShap:
      return "shap";
  }
  return "unknown";
}

std::string_view method_label(Method method) {
  switch (method) {
    case Method::kSmd:
      return "SMD";
    case Method::kTree:
      return "Decision Tree";
    case Method::kShap:
      return "SHAP";
  }
  return "unknown";
}

Ranking make_ranking(Method method, std::vector<std::string> features,
                     std::vector<double> scores) {
  if (features.size() != scores.size())
    throw DataError("ranking has " + std::to_string(features.size()) + " features but " +
                    std::to_string(scores.size()) + " scores");
  Ranking r;
  r.method = method;
  r.ranks = to_ranks(scores);
  r.features = std::move(features);
  r.scores = std::move(scores);
  return r;
}

Agreement classify_agreement(std::optional<double> rho) {
  if (!rho) return Agreement::kUndefined;
  if (*rho > 0.7) return Agreement::kStrong;
  if (*rho > 0.4) return Agreement::kModerate;
  return Agreement::kWeak;
}

std::string_view agreement_label(Agreement agreement) {
  switch (agreement) {
    case Agreement::kStrong:
      return "strong";
    case Agreement::kModerate:
      return "moderate";
    case Agreement::kWeak:
      return "weak";
    case Agreement::kUndefined:
      return "undefined";
  }
  return "undefined";
}

namespace {

Correlation correlate(const Ranking& a, const Ranking& b) {
  Correlation c;
  c.rho = spearman_rho(a.ranks, b.ranks);
  c.agreement = classify_agreement(c.rho);
  return c;
}

}  // namespace

AlignmentReport build_alignment_report(std::string dataset, const EffectSizeTable& smd,
                                       const std::optional<ImportanceVector>& tree_importance,
                                       const std::optional<ImportanceVector>& shap_importance,
                                       const Accuracies& accuracies, nlohmann::json config) {
  AlignmentReport report;
  report.dataset = std::move(dataset);
  const auto names = smd.feature_names();
  report.smd = make_ranking(Method::kSmd, names, smd.abs_delta_by_feature());
  report.smd_delta.assign(names.size(), 0.0);
  for (const auto& e : smd.entries) report.smd_delta.at(e.stats.feature) = e.delta;

  auto attach = [&](Method method, const ImportanceVector& imp) {
    if (imp.values.size() != names.size())
      throw DataError(std::string(method_label(method)) + " importances cover " +
                      std::to_string(imp.values.size()) + " features, SMD covers " +
                      std::to_string(names.size()));
    return make_ranking(method, names, imp.values);
  };
  if (tree_importance) {
    report.tree = attach(Method::kTree, *tree_importance);
    report.smd_tree = correlate(report.smd, *report.tree);
  }
  if (shap_importance) {
    report.shap = attach(Method::kShap, *shap_importance);
    report.smd_shap = correlate(report.smd, *report.shap);
  }
  report.tree_accuracy = accuracies.tree;
  report.mlp_accuracy = accuracies.mlp;
  report.config = std::move(config);
  return report;
}

}  // namespace align_audit
