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

#include "align_audit/effect_size.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "align_audit/error.hpp"
#include "align_audit/ranking.hpp"

namespace align_audit {

GroupStats group_stats(const Dataset& data, std::size_t feature) {
  if (feature >= data.features()) throw DataError("feature index out of range");
  if (data.y.size() != data.rows()) throw DataError("label count does not match rows");
  GroupStats s;
  s.feature = feature;
  const auto col = data.x.col(static_cast<Eigen::Index>(feature));
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const int g = data.y[i];
    if (g != 0 && g != 1) throw DataError("labels must be 0 or 1");
    sum[g] += col(static_cast<Eigen::Index>(i));
    ++count[g];
  }
  if (count[0] == 0 || count[1] == 0)
    throw DataError("target is constant; one outcome group is empty");
  const double mean[2] = {sum[0] / static_cast<double>(count[0]),
                          sum[1] / static_cast<double>(count[1])};
  double ss[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const int g = data.y[i];
    const double d = col(static_cast<Eigen::Index>(i)) - mean[g];
    ss[g] += d * d;
  }
  s.n_positive = count[1];
  s.n_negative = count[0];
  s.mean_positive = mean[1];
  s.mean_negative = mean[0];
  s.var_positive = count[1] > 1 ? ss[1] / static_cast<double>(count[1] - 1) : 0.0;
  s.var_negative = count[0] > 1 ? ss[0] / static_cast<double>(count[0] - 1) : 0.0;
  s.degenerate = count[0] == 1 || count[1] == 1;
  return s;
}

double pooled_std(const GroupStats& s) {
  const std::size_t n = s.n_positive + s.n_negative;
  if (n < 3) throw DataError("pooled standard deviation needs at least 3 observations");
  if (s.var_positive == 0.0 && s.var_negative == 0.0) return 0.0;
  const double num = static_cast<double>(s.n_positive - 1) * s.var_positive +
                     static_cast<double>(s.n_negative - 1) * s.var_negative;
  return std::sqrt(num / static_cast<double>(n - 2));
}

EffectSizeTable smd(const Dataset& data) {
  if (data.features() == 0) throw DataError("no features to compare");
  EffectSizeTable table;
  table.entries.reserve(data.features());
  for (std::size_t j = 0; j < data.features(); ++j) {
    EffectSize e;
    e.feature_name = j < data.feature_names.size() ? data.feature_names[j] : std::to_string(j);
    e.stats = group_stats(data, j);
    e.pooled_std = pooled_std(e.stats);
    const double diff = e.stats.mean_positive - e.stats.mean_negative;
    if (e.pooled_std > 0.0) {
      e.delta = diff / e.pooled_std;
    } else if (diff == 0.0) {
      e.delta = 0.0;
    } else {
      e.delta = std::copysign(std::numeric_limits<double>::infinity(), diff);
      e.degenerate_separator = true;
    }
    e.abs_delta = std::abs(e.delta);
    table.entries.push_back(std::move(e));
  }
  const auto ranks = to_ranks(table.abs_delta_by_feature());
  for (std::size_t j = 0; j < ranks.size(); ++j) table.entries[j].rank = ranks[j];
  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [](const EffectSize& a, const EffectSize& b) { return a.abs_delta > b.abs_delta; });
  return table;
}

std::vector<double> EffectSizeTable::abs_delta_by_feature() const {
  std::vector<double> out(entries.size());
  for (const auto& e : entries) out.at(e.stats.feature) = e.abs_delta;
  return out;
}

std::vector<std::string> EffectSizeTable::feature_names() const {
  std::vector<std::string> out(entries.size());
  for (const auto& e : entries) out.at(e.stats.feature) = e.feature_name;
  return out;
}

}  // namespace align_audit
