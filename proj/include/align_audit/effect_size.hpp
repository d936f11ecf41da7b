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

#ifndef ALIGN_AUDIT_EFFECT_SIZE_HPP_
#define ALIGN_AUDIT_EFFECT_SIZE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "align_audit/types.hpp"

namespace align_audit {

// Per-feature summary of the positive (y = 1) and negative (y = 0) groups.
// Variances use the n - 1 divisor.
struct GroupStats {
  std::size_t feature = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  double mean_positive = 0.0;
  double mean_negative = 0.0;
  double var_positive = 0.0;
  double var_negative = 0.0;
  // A group of size one; its variance is reported as 0.
  bool degenerate = false;
};

GroupStats group_stats(const Dataset& data, std::size_t feature);

// Degrees-of-freedom weighted pooled standard deviation,
//   sqrt(((n1 - 1) s1^2 + (n0 - 1) s0^2) / (n1 + n0 - 2)).
// Throws DataError when n1 + n0 < 3.
double pooled_std(const GroupStats& stats);

struct EffectSize {
  std::string feature_name;
  GroupStats stats;
  double pooled_std = 0.0;
  // (mean_positive - mean_negative) / pooled_std. When the pooled std is 0,
  // equal means give 0 and unequal means give a signed infinity.
  double delta = 0.0;
  double abs_delta = 0.0;
  // 1 = largest |delta|; ties share the average rank.
  double rank = 0.0;
  // Zero pooled std with different means: the feature alone separates the
  // groups perfectly.
  bool degenerate_separator = false;
};

struct EffectSizeTable {
  // Sorted by descending |delta|; ties keep feature order.
  std::vector<EffectSize> entries;

  // |delta| per feature, in the dataset's feature order.
  std::vector<double> abs_delta_by_feature() const;
  std::vector<std::string> feature_names() const;
};

// Standardized mean difference for every feature of data.
EffectSizeTable smd(const Dataset& data);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_EFFECT_SIZE_HPP_
