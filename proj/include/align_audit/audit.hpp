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

#ifndef ALIGN_AUDIT_AUDIT_HPP_
#define ALIGN_AUDIT_AUDIT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "align_audit/alignment.hpp"
#include "align_audit/decision_tree.hpp"
#include "align_audit/effect_size.hpp"
#include "align_audit/kernel_shap.hpp"
#include "align_audit/neural_net.hpp"
#include "align_audit/tabular_data.hpp"
#include "json.hpp"

namespace align_audit {

enum class ModelSelector { kTree, kMlp, kBoth };
// Rows the effect sizes are computed on.
enum class SmdScope { kFull, kTrain };

ModelSelector parse_model_selector(const std::string& s);
SmdScope parse_smd_scope(const std::string& s);
std::string_view to_string(ModelSelector selector);
std::string_view to_string(SmdScope scope);

struct AuditConfig {
  std::filesystem::path data_path;
  std::string target;
  // Columns to ingest; empty means every column except the target.
  std::vector<std::string> features;
  std::vector<std::string> missing_tokens = {"", "NA"};
  double test_fraction = 0.2;
  // Drives the split, MLP and SHAP streams.
  std::uint64_t seed = 42;
  ModelSelector model = ModelSelector::kBoth;
  SmdScope smd_scope = SmdScope::kFull;
  // No files are written when empty.
  std::filesystem::path output_dir;
  // Defaults to the data file's stem.
  std::string dataset_name;

  TreeConfig tree;
  MlpConfig mlp;
  ShapConfig shap;

  void validate() const;
};

// Feature lists for the bundled datasets.
struct DatasetPreset {
  std::string name;
  std::string target;
  std::vector<std::string> features;
};

std::optional<DatasetPreset> find_preset(const std::string& name);
std::vector<std::string> preset_names();

struct AuditResult {
  AlignmentReport report;
  EncodedData encoded;
  TrainTestSplit split;
  EffectSizeTable effect_sizes;
  std::optional<TreeModel> tree;
  std::optional<MlpModel> mlp;
  std::optional<AttributionMatrix> attributions;
  // Wall-clock seconds per stage.
  std::map<std::string, double> timings;
  std::vector<std::filesystem::path> files;
  nlohmann::json metadata;
};

// ingest -> impute -> encode -> split -> standardize -> SMD -> models ->
// SHAP -> alignment. When output_dir is set, writes rankings.csv,
// alignment.json, run_meta.json and, per model, smd_vs_tree.svg or
// smd_vs_shap.svg plus shap_values.csv. Errors are rethrown with the failing
// stage prefixed and keep their exit code.
AuditResult run_audit(const AuditConfig& config);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_AUDIT_HPP_
