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

#include "align_audit/audit.hpp"

#include <chrono>
#include <ctime>
#include <type_traits>

#include "align_audit/error.hpp"
#include "align_audit/report.hpp"

namespace align_audit {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Runs one pipeline stage, timing it and prefixing errors with its name.
template <typename F>
auto stage(const char* name, std::map<std::string, double>& timings, F&& fn) {
  const auto start = Clock::now();
  auto finish = [&] {
    timings[name] += std::chrono::duration<double>(Clock::now() - start).count();
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto out = fn();
      finish();
      return out;
    }
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ExitCode::kTraining, std::string(name) + ": " + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_echo(const AuditConfig& c) {
  json j;
  j["data"] = c.data_path.filename().string();
  j["target"] = c.target;
  j["features"] = c.features;
  j["missing_tokens"] = c.missing_tokens;
  j["test_fraction"] = c.test_fraction;
  j["seed"] = c.seed;
  j["model"] = to_string(c.model);
  j["smd_scope"] = to_string(c.smd_scope);
  j["tree"] = {{"max_depth", c.tree.max_depth},
               {"min_samples_split", c.tree.min_samples_split},
               {"min_samples_leaf", c.tree.min_samples_leaf},
               {"criterion", "entropy"}};
  j["mlp"] = {{"hidden", c.mlp.hidden},
              {"learning_rate", c.mlp.learning_rate},
              {"max_epochs", c.mlp.max_epochs},
              {"early_stopping", c.mlp.early_stopping},
              {"validation_fraction", c.mlp.validation_fraction},
              {"patience", c.mlp.patience},
              {"tolerance", c.mlp.tolerance},
              {"batch_size", c.mlp.batch_size}};
  j["shap"] = {{"background_size", c.shap.background_size},
               {"enumeration_limit", c.shap.enumeration_limit},
               {"sampled_coalitions", c.shap.sampled_coalitions}};
  return j;
}

// Choices the audit makes where the method leaves room; recorded so every
// run is self-describing.
json decisions(const AuditConfig& c) {
  return {
      {"numeric_imputation", "median of observed values"},
      {"categorical_imputation", "mode, ties to first-appearing level"},
      {"binary_categorical_encoding", "single 0/1 column, lexicographically first level = 1"},
      {"multilevel_categorical_encoding", "one indicator per level, levels sorted"},
      {"split", "unstratified seeded permutation, test = last round(n * fraction) rows"},
      {"scaling", "z-score with population std from the train split; MLP and SHAP only"},
      {"smd_scope", to_string(c.smd_scope)},
      {"smd_variance", "sample variance (n - 1), pooled over both groups"},
      {"tree_features", "unscaled"},
      {"tree_importance", "weighted entropy decrease, normalized to sum 1"},
      {"shap_target", "predicted probability of class 1"},
      {"shap_background", "seeded uniform draw from the standardized train split"},
      {"shap_explained_set", "standardized test split"},
      {"shap_aggregation", "mean absolute attribution, normalized to sum 1"},
      {"rank_ties", "average rank"},
      {"agreement_bands", "strong > 0.7, moderate > 0.4, weak otherwise"},
  };
}

json tree_summary(const TreeModel& tree) {
  std::size_t splits = 0;
  for (const auto& n : tree.nodes()) splits += !n.is_leaf();
  return {{"depth", tree.depth()},
          {"nodes", tree.nodes().size()},
          {"leaves", tree.leaf_count()},
          {"splits", splits}};
}

json mlp_summary(const MlpModel& mlp) {
  json history = json::array();
  for (const auto& r : mlp.history) {
    json h = {{"epoch", r.epoch}, {"loss", r.loss}};
    h["validation_accuracy"] = r.validation_accuracy ? json(*r.validation_accuracy) : json(nullptr);
    history.push_back(std::move(h));
  }
  return {{"epochs_run", mlp.history.size()},
          {"best_epoch", mlp.best_epoch},
          {"stopped_early", mlp.stopped_early},
          {"parameters", mlp.parameter_count()},
          {"history", std::move(history)}};
}

}  // namespace

ModelSelector parse_model_selector(const std::string& s) {
  if (s == "tree") return ModelSelector::kTree;
  if (s == "mlp") return ModelSelector::kMlp;
  if (s == "both") return ModelSelector::kBoth;
  throw ConfigError("model must be tree, mlp or both, got '" + s + "'");
}

SmdScope parse_smd_scope(const std::string& s) {
  if (s == "full") return SmdScope::kFull;
  if (s == "train") return SmdScope::kTrain;
  throw ConfigError("smd scope must be full or train, got '" + s + "'");
}

std::string_view to_string(ModelSelector selector) {
  switch (selector) {
    case ModelSelector::kTree:
      return "tree";
    case ModelSelector::kMlp:
      return "mlp";
    case ModelSelector::kBoth:
      return "both";
  }
  return "both";
}

std::string_view to_string(SmdScope scope) {
  return scope == SmdScope::kFull ? "full" : "train";
}

void AuditConfig::validate() const {
  if (data_path.empty()) throw ConfigError("no data file given");
  if (target.empty()) throw ConfigError("no target column given");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test fraction must lie in (0, 1)");
  tree.validate();
  mlp.validate();
  if (shap.background_size < 1) throw ConfigError("background size must be >= 1");
}

std::optional<DatasetPreset> find_preset(const std::string& name) {
  if (name == "titanic")
    return DatasetPreset{"titanic", "Survived",
                         {"Pclass", "Sex", "Age", "SibSp", "Parch", "Fare", "Embarked"}};
  if (name == "diabetes")
    return DatasetPreset{"diabetes",
                         "Outcome",
                         {"Pregnancies", "Glucose", "BloodPressure", "SkinThickness", "Insulin",
                          "BMI", "DiabetesPedigreeFunction", "Age"}};
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"titanic", "diabetes"}; }

AuditResult run_audit(const AuditConfig& input) {
  AuditResult result;
  auto& t = result.timings;
  stage("config", t, [&] { input.validate(); });
  AuditConfig cfg = input;
  cfg.tree.seed = cfg.seed;
  cfg.mlp.seed = cfg.seed;
  cfg.shap.seed = cfg.seed;
  const std::string dataset =
      cfg.dataset_name.empty() ? cfg.data_path.stem().string() : cfg.dataset_name;
  const bool want_tree = cfg.model != ModelSelector::kMlp;
  const bool want_mlp = cfg.model != ModelSelector::kTree;

  const RawTable raw = stage("ingest", t, [&] {
    CsvOptions options;
    options.missing_tokens = cfg.missing_tokens;
    options.columns = cfg.features;
    return load_csv(cfg.data_path, cfg.target, options);
  });
  const FeatureSchema schema = stage("schema", t, [&] { return infer_schema(raw, cfg.target); });
  const RawTable imputed = stage("impute", t, [&] { return impute(raw, schema); });
  result.encoded = stage("encode", t, [&] { return encode(imputed, schema); });
  const Dataset& data = result.encoded.data;
  result.split = stage("split", t, [&] { return split(data, cfg.test_fraction, cfg.seed); });
  const auto& train = result.split.train;
  const auto& test = result.split.test;

  result.effect_sizes = stage("smd", t, [&] {
    return smd(cfg.smd_scope == SmdScope::kFull ? data : train);
  });

  Accuracies accuracies;
  std::optional<ImportanceVector> tree_importance;
  std::optional<ImportanceVector> shap_importance;

  if (want_tree) {
    result.tree = stage("tree", t, [&] { return fit_tree(train, cfg.tree); });
    accuracies.tree = ModelAccuracy{accuracy(result.tree->predict(train.x), train.y),
                                    accuracy(result.tree->predict(test.x), test.y)};
    tree_importance = tree_importances(*result.tree);
  }

  if (want_mlp) {
    const Standardized scaled = stage("standardize", t, [&] { return standardize(train, test); });
    result.mlp = stage("mlp", t, [&] { return fit_mlp(scaled.train, cfg.mlp); });
    result.mlp->scaling = scaled.params;
    accuracies.mlp = ModelAccuracy{accuracy(result.mlp->predict(scaled.train.x), scaled.train.y),
                                   accuracy(result.mlp->predict(scaled.test.x), scaled.test.y)};
    const MlpModel& mlp = *result.mlp;
    const ModelFn model = [&mlp](const Matrix& rows) { return mlp.predict_proba(rows); };
    result.attributions = stage("shap", t, [&] {
      const Matrix background =
          sample_background(scaled.train.x, cfg.shap.background_size, cfg.shap.seed);
      return explain(model, scaled.test.x, background, cfg.shap, result.split.test_rows);
    });
    shap_importance = aggregate_importance(*result.attributions);
  }

  result.report = stage("alignment", t, [&] {
    json config = config_echo(cfg);
    config["decisions"] = decisions(cfg);
    config["target_positive_level"] = result.encoded.target_positive_level;
    return build_alignment_report(dataset, result.effect_sizes, tree_importance,
                                  shap_importance, accuracies, std::move(config));
  });

  json meta;
  meta["dataset"] = dataset;
  meta["generated_at"] = utc_timestamp();
  meta["rows"] = data.rows();
  meta["train_rows"] = train.rows();
  meta["test_rows"] = test.rows();
  meta["missing_cells_imputed"] = raw.missing_count() - raw.missing_count(schema.target_index);
  json columns = json::array();
  for (const auto& c : result.encoded.columns)
    columns.push_back({{"name", c.name}, {"source", c.source_column}, {"level", c.level}});
  meta["encoded_columns"] = std::move(columns);
  meta["target"] = {{"column", cfg.target},
                    {"positive_level", result.encoded.target_positive_level},
                    {"negative_level", result.encoded.target_negative_level}};
  meta["warnings"] = result.encoded.warnings;
  meta["decisions"] = decisions(cfg);
  json degenerate = json::array();
  for (const auto& e : result.effect_sizes.entries)
    if (e.degenerate_separator) degenerate.push_back(e.feature_name);
  meta["degenerate_separators"] = std::move(degenerate);
  if (result.tree) meta["tree"] = tree_summary(*result.tree);
  if (result.mlp) meta["mlp"] = mlp_summary(*result.mlp);
  if (result.attributions) {
    meta["shap"] = {{"base_value", result.attributions->base_value},
                    {"explained_instances", result.attributions->phi.rows()},
                    {"exact_enumeration", result.attributions->exact},
                    {"max_local_accuracy_residual", result.attributions->max_residual},
                    {"no_signal", shap_importance->no_signal}};
  }
  meta["timings_seconds"] = result.timings;
  result.metadata = meta;

  if (!cfg.output_dir.empty()) {
    stage("emit", t, [&] {
      std::error_code ec;
      std::filesystem::create_directories(cfg.output_dir, ec);
      if (ec) throw ConfigError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
      const auto& dir = cfg.output_dir;
      auto record = [&](const std::filesystem::path& p) { result.files.push_back(p); };
      emit_csv(result.report, dir / "rankings.csv");
      record(dir / "rankings.csv");
      emit_json(result.report, dir / "alignment.json");
      record(dir / "alignment.json");
      if (result.report.tree) {
        emit_scatter(result.report.smd, *result.report.tree, result.report.smd_tree->rho,
                     dir / "smd_vs_tree.svg", dataset);
        record(dir / "smd_vs_tree.svg");
      }
      if (result.report.shap) {
        emit_scatter(result.report.smd, *result.report.shap, result.report.smd_shap->rho,
                     dir / "smd_vs_shap.svg", dataset);
        record(dir / "smd_vs_shap.svg");
        emit_attributions(*result.attributions, data.feature_names, dir / "shap_values.csv");
        record(dir / "shap_values.csv");
      }
      write_json(result.metadata, dir / "run_meta.json");
      record(dir / "run_meta.json");
    });
  }
  return result;
}

}  // namespace align_audit
