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

#include "align_audit/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "align_audit/error.hpp"

namespace align_audit {
namespace {

namespace fs = std::filesystem;

Dataset toy() {
  Dataset d;
  d.x = Matrix(6, 3);
  d.x << 0, 1, 5, 1, 2, 4, 0, 3, 6, 5, 2, 5, 6, 4, 5, 5, 3, 6;
  d.y = {0, 0, 0, 1, 1, 1};
  d.feature_names = {"f0", "f1", "f2"};
  return d;
}

AlignmentReport sample_report(bool with_shap = true) {
  Accuracies acc;
  acc.tree = ModelAccuracy{0.9, 2.0 / 3.0};
  if (with_shap) acc.mlp = ModelAccuracy{1.0 / 7.0, 0.5};
  std::optional<ImportanceVector> shap;
  if (with_shap) shap = ImportanceVector{{0.1 / 3.0, 0.5, 0.3 + 1e-13}, false};
  return build_alignment_report("toy", smd(toy()),
                                ImportanceVector{{0.6, 0.4 / 3.0, 0.0}, false}, shap, acc,
                                {{"seed", 42}});
}

// Minimal XML checker: balanced tags, quoted attributes, known entities.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < xml.size()) {
    if (xml[i] == '&') {
      std::size_t end = xml.find(';', i);
      if (end == std::string::npos) return false;
      std::string entity = xml.substr(i + 1, end - i - 1);
      if (entity != "amp" && entity != "lt" && entity != "gt" && entity != "quot" &&
          entity != "apos")
        return false;
      i = end + 1;
      continue;
    }
    if (xml[i] != '<') {
      if (xml[i] == '>') return false;
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    char quote = 0;
    while (end < xml.size() && (quote || xml[end] != '>')) {
      if (quote && xml[end] == quote) quote = 0;
      else if (!quote && (xml[end] == '"' || xml[end] == '\'')) quote = xml[end];
      else if (!quote && xml[end] == '<') return false;
      ++end;
    }
    if (end >= xml.size()) return false;
    std::string tag = xml.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.front() == '?') continue;
    if (tag.front() == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    std::string name = tag.substr(0, tag.find_first_of(" \n/"));
    if (stack.empty()) {
      if (root_seen) return false;
      root_seen = true;
    }
    if (tag.back() != '/') stack.push_back(name);
  }
  return root_seen && stack.empty();
}

struct Point {
  double x, y;
};

std::vector<Point> points(const std::string& svg) {
  std::regex circle(R"re(<circle cx="([0-9.]+)" cy="([0-9.]+)")re");
  std::vector<Point> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator();
       ++it)
    out.push_back({std::stod((*it)[1]), std::stod((*it)[2])});
  return out;
}

TEST(CsvReportTest, OneLinePerFeature) {
  std::string csv = rankings_csv(sample_report());
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0],
            "feature,smd,smd_abs,smd_rank,tree_importance,tree_rank,shap_importance,shap_rank");
  EXPECT_EQ(lines[1].substr(0, 3), "f0,");
}

TEST(CsvReportTest, AbsentModelLeavesEmptyCells) {
  std::string csv = rankings_csv(sample_report(false));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(row.substr(row.size() - 2), ",,");
}

TEST(JsonReportTest, RoundTrip) {
  AlignmentReport r = sample_report();
  nlohmann::json j = report_to_json(r);
  AlignmentReport back = report_from_json(nlohmann::json::parse(j.dump(2)));
  EXPECT_EQ(back.dataset, r.dataset);
  EXPECT_EQ(back.features(), r.features());
  for (std::size_t k = 0; k < r.features().size(); ++k) {
    EXPECT_NEAR(back.smd_delta[k], r.smd_delta[k], 1e-12);
    EXPECT_NEAR(back.smd.scores[k], r.smd.scores[k], 1e-12);
    EXPECT_EQ(back.smd.ranks[k], r.smd.ranks[k]);
    EXPECT_NEAR(back.tree->scores[k], r.tree->scores[k], 1e-12);
    EXPECT_EQ(back.tree->ranks[k], r.tree->ranks[k]);
    EXPECT_NEAR(back.shap->scores[k], r.shap->scores[k], 1e-12);
    EXPECT_EQ(back.shap->ranks[k], r.shap->ranks[k]);
  }
  EXPECT_NEAR(*back.smd_tree->rho, *r.smd_tree->rho, 1e-12);
  EXPECT_NEAR(*back.smd_shap->rho, *r.smd_shap->rho, 1e-12);
  EXPECT_EQ(back.smd_shap->agreement, r.smd_shap->agreement);
  EXPECT_NEAR(back.mlp_accuracy->train, 1.0 / 7.0, 1e-12);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(report_to_json(back), j);
}

TEST(JsonReportTest, Schema) {
  nlohmann::json j = report_to_json(sample_report());
  for (const char* key : {"dataset", "rho", "rankings", "accuracies", "config"})
    EXPECT_TRUE(j.contains(key)) << key;
  for (const char* key : {"feature", "smd", "smd_rank", "tree_importance", "tree_rank",
                          "shap_importance", "shap_rank"})
    EXPECT_TRUE(j["rankings"][0].contains(key)) << key;
  nlohmann::json tree_only = report_to_json(sample_report(false));
  EXPECT_FALSE(tree_only["rho"].contains("smd_shap"));
  EXPECT_FALSE(tree_only["rankings"][0].contains("shap_rank"));
  EXPECT_FALSE(tree_only["accuracies"].contains("mlp"));
}

TEST(JsonReportTest, UndefinedRhoIsNull) {
  AlignmentReport r = build_alignment_report("toy", smd(toy()),
                                             ImportanceVector{{0, 0, 0}, true}, std::nullopt, {});
  nlohmann::json j = report_to_json(r);
  EXPECT_TRUE(j["rho"]["smd_tree"].is_null());
  EXPECT_FALSE(report_from_json(j).smd_tree->rho.has_value());
}

TEST(JsonReportTest, InfiniteEffectSurvives) {
  Dataset d;
  d.x = Matrix(4, 1);
  d.x << 1, 1, 2, 2;
  d.y = {0, 0, 1, 1};
  d.feature_names = {"sep"};
  AlignmentReport r = build_alignment_report("sep", smd(d), std::nullopt, std::nullopt, {});
  nlohmann::json j = report_to_json(r);
  EXPECT_EQ(j["rankings"][0]["smd"], "inf");
  EXPECT_TRUE(std::isinf(report_from_json(j).smd_delta[0]));
}

TEST(JsonReportTest, MalformedInput) {
  EXPECT_THROW(report_from_json(nlohmann::json::object()), DataError);
}

TEST(SvgTest, WellFormedWithEscapedNames) {
  Ranking a = make_ranking(Method::kSmd, {"a<b", "c&d", "e\"f"}, {3, 2, 1});
  Ranking b = make_ranking(Method::kShap, {"a<b", "c&d", "e\"f"}, {1, 3, 2});
  std::string svg = scatter_svg(a, b, 0.5, "x&y");
  EXPECT_TRUE(well_formed(svg));
  EXPECT_NE(svg.find("class=\"diagonal\""), std::string::npos);
  EXPECT_NE(svg.find("0.500"), std::string::npos);
  EXPECT_TRUE(well_formed(scatter_svg(a, b, std::nullopt)));
  EXPECT_FALSE(well_formed("<svg><g></svg></g>"));
  EXPECT_FALSE(well_formed("<svg>a & b</svg>"));
}

TEST(SvgTest, IdenticalRankingsOnDiagonal) {
  Ranking a = make_ranking(Method::kSmd, {"p", "q", "r", "s"}, {0.4, 0.1, 0.9, 0.3});
  Ranking b = make_ranking(Method::kTree, {"p", "q", "r", "s"}, {4, 1, 9, 3});
  auto pts = points(scatter_svg(a, b, 1.0));
  ASSERT_EQ(pts.size(), 4u);
  for (const auto& p : pts) EXPECT_NEAR(p.x, p.y, 1e-9);
}

TEST(SvgTest, ReversedRankingsOnAntiDiagonal) {
  Ranking a = make_ranking(Method::kSmd, {"p", "q", "r", "s"}, {4, 3, 2, 1});
  Ranking b = make_ranking(Method::kTree, {"p", "q", "r", "s"}, {1, 2, 3, 4});
  auto pts = points(scatter_svg(a, b, -1.0));
  ASSERT_EQ(pts.size(), 4u);
  const double sum = pts[0].x + pts[0].y;
  for (const auto& p : pts) EXPECT_NEAR(p.x + p.y, sum, 1e-9);
  EXPECT_NE(pts[0].x, pts[1].x);
}

TEST(SvgTest, MismatchedFeatures) {
  Ranking a = make_ranking(Method::kSmd, {"p", "q"}, {1, 2});
  Ranking b = make_ranking(Method::kTree, {"p", "r"}, {1, 2});
  EXPECT_THROW(scatter_svg(a, b, 1.0), DataError);
}

TEST(FileOutputTest, WritesAndReportsFailures) {
  fs::path dir = fs::temp_directory_path() / "align_audit_report_test";
  fs::create_directories(dir);
  AlignmentReport r = sample_report();
  emit_json(r, dir / "alignment.json");
  emit_csv(r, dir / "rankings.csv");
  std::ifstream in(dir / "alignment.json");
  nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j["dataset"], "toy");
  EXPECT_THROW(emit_json(r, dir / "missing" / "x.json"), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace align_audit
