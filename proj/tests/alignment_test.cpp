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

#include <gtest/gtest.h>

#include "align_audit/error.hpp"

namespace align_audit {
namespace {

// f0 separates strongly, f1 weakly, f2 barely.
Dataset toy() {
  Dataset d;
  d.x = Matrix(6, 3);
  d.x << 0, 1, 5, 1, 2, 4, 0, 3, 6, 5, 2, 5, 6, 4, 5, 5, 3, 6;
  d.y = {0, 0, 0, 1, 1, 1};
  d.feature_names = {"f0", "f1", "f2"};
  return d;
}

ImportanceVector importance(std::vector<double> v) { return {std::move(v), false}; }

TEST(MakeRankingTest, RanksScores) {
  Ranking r = make_ranking(Method::kTree, {"a", "b", "c"}, {0.2, 0.5, 0.2});
  EXPECT_EQ(r.ranks, (std::vector<double>{2.5, 1, 2.5}));
  EXPECT_EQ(method_tag(r.method), "tree");
  EXPECT_THROW(make_ranking(Method::kSmd, {"a"}, {1, 2}), DataError);
}

TEST(AgreementTest, Thresholds) {
  EXPECT_EQ(classify_agreement(0.71), Agreement::kStrong);
  EXPECT_EQ(classify_agreement(0.7), Agreement::kModerate);
  EXPECT_EQ(classify_agreement(0.41), Agreement::kModerate);
  EXPECT_EQ(classify_agreement(0.4), Agreement::kWeak);
  EXPECT_EQ(classify_agreement(-0.9), Agreement::kWeak);
  EXPECT_EQ(classify_agreement(std::nullopt), Agreement::kUndefined);
  EXPECT_EQ(agreement_label(Agreement::kStrong), "strong");
}

TEST(AlignmentReportTest, ProportionalImportancesAgreePerfectly) {
  EffectSizeTable t = smd(toy());
  std::vector<double> abs = t.abs_delta_by_feature();
  std::vector<double> scaled;
  for (double v : abs) scaled.push_back(3.0 * v);
  AlignmentReport r = build_alignment_report("toy", t, importance(scaled), importance(abs), {});
  ASSERT_TRUE(r.smd_tree && r.smd_tree->rho);
  EXPECT_DOUBLE_EQ(*r.smd_tree->rho, 1.0);
  EXPECT_EQ(r.smd_tree->agreement, Agreement::kStrong);
  EXPECT_EQ(r.features(), (std::vector<std::string>{"f0", "f1", "f2"}));
  EXPECT_EQ(r.tree->features, r.features());
  EXPECT_EQ(r.smd.ranks[0], 1.0);
}

TEST(AlignmentReportTest, AbsentModelsAndUndefinedRho) {
  EffectSizeTable t = smd(toy());
  AlignmentReport r =
      build_alignment_report("toy", t, importance({0, 0, 0}), std::nullopt, {});
  ASSERT_TRUE(r.smd_tree.has_value());
  EXPECT_FALSE(r.smd_tree->rho.has_value());
  EXPECT_EQ(r.smd_tree->agreement, Agreement::kUndefined);
  EXPECT_FALSE(r.shap.has_value());
  EXPECT_FALSE(r.smd_shap.has_value());
}

TEST(AlignmentReportTest, ReversedImportances) {
  EffectSizeTable t = smd(toy());
  std::vector<double> abs = t.abs_delta_by_feature();
  std::vector<double> reversed;
  for (double v : abs) reversed.push_back(1.0 / (1.0 + v));
  AlignmentReport r = build_alignment_report("toy", t, importance(reversed), std::nullopt, {});
  EXPECT_DOUBLE_EQ(*r.smd_tree->rho, -1.0);
  EXPECT_EQ(r.smd_tree->agreement, Agreement::kWeak);
}

TEST(AlignmentReportTest, FeatureCountMismatch) {
  EffectSizeTable t = smd(toy());
  EXPECT_THROW(build_alignment_report("toy", t, importance({1, 2}), std::nullopt, {}),
               DataError);
}

}  // namespace
}  // namespace align_audit
