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

// align-audit: checks whether trained classifiers rank features the way the
// data does.
//
//   align-audit run --data titanic.csv --preset titanic --out out/
//   align-audit run --data pima.csv --target Outcome --model tree
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 training or explanation failure.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "align_audit/audit.hpp"
#include "align_audit/error.hpp"

namespace {

using align_audit::ExitCode;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

std::size_t thread_cap() {
  const char* env = std::getenv("ALIGN_AUDIT_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw align_audit::ConfigError("ALIGN_AUDIT_THREADS must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::string format_rho(const std::optional<align_audit::Correlation>& c) {
  if (!c) return "n/a";
  if (!c->rho) return "undefined";
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << *c->rho << " ("
    << align_audit::agreement_label(c->agreement) << ")";
  return s.str();
}

void print_summary(const align_audit::AuditResult& result) {
  const auto& r = result.report;
  std::cout << "dataset: " << r.dataset << " (" << result.encoded.data.rows() << " rows, "
            << r.features().size() << " features)\n";
  std::cout << std::left << std::setw(28) << "feature" << std::right << std::setw(10) << "SMD"
            << std::setw(10) << "SMD rk" << std::setw(10) << "tree rk" << std::setw(10)
            << "SHAP rk" << '\n';
  for (const auto& e : result.effect_sizes.entries) {
    const std::size_t j = e.stats.feature;
    std::cout << std::left << std::setw(28) << e.feature_name << std::right << std::fixed
              << std::setprecision(3) << std::setw(10) << e.delta << std::setprecision(1)
              << std::setw(10) << r.smd.ranks[j];
    if (r.tree) {
      std::cout << std::setw(10) << r.tree->ranks[j];
    } else {
      std::cout << std::setw(10) << "-";
    }
    if (r.shap) {
      std::cout << std::setw(10) << r.shap->ranks[j];
    } else {
      std::cout << std::setw(10) << "-";
    }
    std::cout << '\n';
  }
  std::cout << std::setprecision(3);
  if (r.tree_accuracy)
    std::cout << "tree accuracy: train " << r.tree_accuracy->train << ", test "
              << r.tree_accuracy->test << '\n';
  if (r.mlp_accuracy)
    std::cout << "mlp accuracy:  train " << r.mlp_accuracy->train << ", test "
              << r.mlp_accuracy->test << '\n';
  std::cout << "rho(smd, tree): " << format_rho(r.smd_tree) << '\n';
  std::cout << "rho(smd, shap): " << format_rho(r.smd_shap) << '\n';
  for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-data alignment audit for binary classifiers"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the full audit on a CSV file");
  std::string data, target, features, preset, model = "both", scope = "full", out = "audit_out";
  std::string na_values;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::size_t background = 100;
  run->add_option("--data", data, "Input CSV with a header row")->required();
  run->add_option("--target", target, "Binary outcome column");
  run->add_option("--features", features, "Comma-separated feature columns to ingest");
  run->add_option("--preset", preset, "Bundled feature list: titanic or diabetes");
  run->add_option("--model", model, "tree, mlp or both")->capture_default_str();
  run->add_option("--test-fraction", test_fraction, "Held-out fraction")->capture_default_str();
  run->add_option("--seed", seed, "Seed for the split, MLP and SHAP")->capture_default_str();
  run->add_option("--smd-scope", scope, "Rows used for effect sizes: full or train")
      ->capture_default_str();
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--na-values", na_values,
                  "Extra comma-separated tokens read as missing (in addition to '' and NA)");
  run->add_option("--background-size", background, "SHAP background rows")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    align_audit::AuditConfig cfg;
    cfg.data_path = data;
    if (!preset.empty()) {
      const auto p = align_audit::find_preset(preset);
      if (!p) throw align_audit::ConfigError("unknown preset '" + preset + "'");
      cfg.target = p->target;
      cfg.features = p->features;
      cfg.dataset_name = p->name;
    }
    if (!target.empty()) cfg.target = target;
    if (!features.empty()) cfg.features = split_list(features);
    if (!na_values.empty())
      for (auto& token : split_list(na_values)) cfg.missing_tokens.push_back(token);
    cfg.model = align_audit::parse_model_selector(model);
    cfg.smd_scope = align_audit::parse_smd_scope(scope);
    cfg.test_fraction = test_fraction;
    cfg.seed = seed;
    cfg.output_dir = out;
    cfg.shap.background_size = background;
    cfg.shap.threads = thread_cap();

    const auto result = align_audit::run_audit(cfg);
    print_summary(result);
    return 0;
  } catch (const align_audit::Error& e) {
    std::cerr << "align-audit: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "align-audit: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kTraining);
  }
}
