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

#ifndef ALIGN_AUDIT_RANKING_HPP_
#define ALIGN_AUDIT_RANKING_HPP_

#include <optional>
#include <span>
#include <vector>

namespace align_audit {

// Descending ranks: the largest score gets rank 1. Tied scores share the
// average of the positions they span. +inf is allowed and ranks ahead of
// every finite score. Throws DataError on an empty input or NaN.
std::vector<double> to_ranks(std::span<const double> scores);

// Spearman's rho as the Pearson correlation of two rank vectors, which stays
// correct under average-rank ties. Returns nullopt when either side is
// constant, since rho is then undefined. Throws DataError unless the inputs
// have equal length >= 2.
std::optional<double> spearman_rho(std::span<const double> ranks_a,
                                   std::span<const double> ranks_b);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_RANKING_HPP_
