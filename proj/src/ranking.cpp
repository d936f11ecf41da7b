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

#include "align_audit/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "align_audit/error.hpp"

namespace align_audit {

std::vector<double> to_ranks(std::span<const double> scores) {
  if (scores.empty()) throw DataError("cannot rank an empty score vector");
  for (double s : scores)
    if (std::isnan(s)) throw DataError("cannot rank NaN scores");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Positions i+1 .. j (1-based) share their mean.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman_rho(std::span<const double> ranks_a,
                                   std::span<const double> ranks_b) {
  if (ranks_a.size() != ranks_b.size())
    throw DataError("rank vectors differ in length");
  const std::size_t n = ranks_a.size();
  if (n < 2) throw DataError("rank correlation needs at least 2 items");
  const double mean_a = std::accumulate(ranks_a.begin(), ranks_a.end(), 0.0) / n;
  const double mean_b = std::accumulate(ranks_b.begin(), ranks_b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ranks_a[i] - mean_a;
    const double db = ranks_b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace align_audit
