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

#ifndef ALIGN_AUDIT_TYPES_HPP_
#define ALIGN_AUDIT_TYPES_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace align_audit {

// Row-major so that a single observation is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Numeric design matrix with binary labels. Rows are observations.
struct Dataset {
  Matrix x;
  std::vector<std::string> feature_names;
  std::vector<int> y;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(x.cols()); }

  // Throws DataError when a Dataset invariant does not hold.
  void validate() const;

  // Subset of rows, in the given order.
  Dataset select_rows(const std::vector<std::size_t>& rows) const;
};

// Per-feature importance, in feature order. Normalized to sum 1 unless every
// entry is zero.
struct ImportanceVector {
  std::vector<double> values;
  // Set when the underlying attributions carried no signal at all and the
  // values were defined by convention.
  bool no_signal = false;
};

// Fraction of predictions equal to the labels. Throws DataError on a length
// mismatch or empty input.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_TYPES_HPP_
