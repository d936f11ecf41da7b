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

#ifndef ALIGN_AUDIT_REPORT_HPP_
#define ALIGN_AUDIT_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "align_audit/alignment.hpp"
#include "align_audit/kernel_shap.hpp"
#include "json.hpp"

namespace align_audit {

// alignment.json layout:
//   {dataset, rho: {smd_tree, smd_shap}, agreement: {...},
//    rankings: [{feature, smd, smd_abs, smd_rank, tree_importance, tree_rank,
//                shap_importance, shap_rank}],
//    accuracies: {tree: {train, test}, mlp: {train, test}}, config}
// A model that was not run has no keys at all; an undefined rho is null.
// Infinite magnitudes are written as the strings "inf" and "-inf".
nlohmann::json report_to_json(const AlignmentReport& report);
AlignmentReport report_from_json(const nlohmann::json& json);

// Writes pretty-printed JSON followed by a newline.
void write_json(const nlohmann::json& json, const std::filesystem::path& path);
void emit_json(const AlignmentReport& report, const std::filesystem::path& path);

// rankings.csv: header plus one row per feature, columns
//   feature,smd,smd_abs,smd_rank,tree_importance,tree_rank,shap_importance,shap_rank
// Columns for a model that was not run are left empty.
std::string rankings_csv(const AlignmentReport& report);
void emit_csv(const AlignmentReport& report, const std::filesystem::path& path);

// Per-instance attributions: instance_id,output,base_value,<features...>.
void emit_attributions(const AttributionMatrix& attributions,
                       const std::vector<std::string>& features,
                       const std::filesystem::path& path);

// Standalone SVG with one labeled point per feature at (rank under a,
// rank under b), the identity diagonal, axis labels and rho in the title.
std::string scatter_svg(const Ranking& a, const Ranking& b, std::optional<double> rho,
                        const std::string& dataset = {});
void emit_scatter(const Ranking& a, const Ranking& b, std::optional<double> rho,
                  const std::filesystem::path& path, const std::string& dataset = {});

}  // namespace align_audit

#endif  // ALIGN_AUDIT_REPORT_HPP_
