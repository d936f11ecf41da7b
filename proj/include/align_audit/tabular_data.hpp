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

#ifndef ALIGN_AUDIT_TABULAR_DATA_HPP_
#define ALIGN_AUDIT_TABULAR_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "align_audit/types.hpp"

namespace align_audit {

// Cells of a column that parsed entirely as numbers; nullopt marks missing.
using NumericCells = std::vector<std::optional<double>>;
// Cells of any other column.
using CategoricalCells = std::vector<std::optional<std::string>>;
using ColumnCells = std::variant<NumericCells, CategoricalCells>;

struct RawTable {
  std::vector<std::string> column_names;
  std::vector<ColumnCells> columns;
  std::size_t row_count = 0;

  // Index of a column by name, or nullopt.
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t missing_count(std::size_t column) const;
  std::size_t missing_count() const;
};

struct CsvOptions {
  // Cell values (after trimming surrounding whitespace) that mean "missing".
  std::vector<std::string> missing_tokens = {"", "NA"};
  // When non-empty, only these columns and the target are kept, in the
  // listed order with the target last.
  std::vector<std::string> columns;
};

// Reads an RFC 4180 CSV with a header row. A column is numeric when every
// non-missing cell parses as a real number.
RawTable load_csv(const std::filesystem::path& path, const std::string& target_name,
                  const CsvOptions& options = {});
RawTable parse_csv(std::istream& in, const std::string& target_name,
                   const CsvOptions& options = {});

enum class ColumnKind { kNumeric, kCategorical };

struct FeatureSchema {
  std::vector<ColumnKind> kinds;
  std::string target;
  std::size_t target_index = 0;
  // Observed levels per column in first-appearance order; empty for numeric
  // columns. The target's levels are always populated.
  std::vector<std::vector<std::string>> levels;
};

// Classifies each column. The target is always categorical and must show
// exactly two distinct non-missing values.
FeatureSchema infer_schema(const RawTable& table, const std::string& target_name);

// Fills missing cells: numeric columns with the median of the observed values,
// categorical columns with the most frequent level (ties go to the level that
// appears first). The target column is left untouched.
RawTable impute(const RawTable& table, const FeatureSchema& schema);

// How one encoded column was produced.
struct EncodedColumn {
  std::string name;
  std::string source_column;
  // Empty for numeric pass-through; the level coded as 1 otherwise.
  std::string level;
};

struct EncodedData {
  Dataset data;
  std::vector<EncodedColumn> columns;
  std::string target_positive_level;
  std::string target_negative_level;
  std::vector<std::string> warnings;
};

// Turns an imputed table into a numeric Dataset.
//   numeric            -> passed through
//   two levels         -> one 0/1 column named after the source; the
//                         lexicographically smallest level is coded 1
//   k >= 3 levels      -> k indicator columns "<col>=<level>", levels sorted
//   one level          -> a constant column, with a warning
// Target levels that read as 0 and 1 map to themselves; otherwise the
// lexicographically larger level is the positive class.
EncodedData encode(const RawTable& table, const FeatureSchema& schema);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  // Row indices into the source dataset.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// Number of held-out rows for a fraction: n * fraction rounded half up.
std::size_t holdout_count(std::size_t n, double fraction);

// Seeded unstratified split. Rows are permuted and the last
// holdout_count(n, test_fraction) rows become the test set.
TrainTestSplit split(const Dataset& data, double test_fraction, std::uint64_t seed);

// Train-set statistics for z-scoring. std is the population standard
// deviation (divisor n).
struct ScalingParams {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<bool> constant;

  Matrix transform(const Matrix& x) const;
  Matrix inverse_transform(const Matrix& z) const;
};

ScalingParams fit_scaling(const Matrix& x);

struct Standardized {
  Dataset train;
  Dataset test;
  ScalingParams params;
};

// Centers and scales both partitions with the train statistics. Constant
// features are only centered, so they become 0.
Standardized standardize(const Dataset& train, const Dataset& test);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_TABULAR_DATA_HPP_
