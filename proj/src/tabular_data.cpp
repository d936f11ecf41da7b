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

#include "align_audit/tabular_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "align_audit/error.hpp"
#include "align_audit/random.hpp"

namespace align_audit {

namespace {

constexpr std::uint64_t kSplitStream = 1;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Splits CSV text into records of fields. Handles quoted fields with embedded
// separators, doubled quotes and line breaks, and both LF and CRLF endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false at end of input. line() is the 1-based line where the
  // record started.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;; c = in_.get()) {
      if (quoted) {
        if (c == EOF) throw DataError("unterminated quoted field starting on line " +
                                      std::to_string(record_line_));
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == '"' && !was_quoted && trim(field).empty()) {
        field.clear();
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n' || c == EOF) {
        ++line_;
        fields.push_back(std::move(field));
        return true;
      } else if (c == '\r') {
        if (in_.peek() == '\n') continue;
        ++line_;
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(static_cast<char>(c));
      }
    }
  }

  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

bool is_blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace

void Dataset::validate() const {
  if (rows() < 2) throw DataError("dataset needs at least 2 rows");
  if (features() < 1) throw DataError("dataset needs at least 1 feature");
  if (feature_names.size() != features())
    throw DataError("feature name count does not match the feature matrix");
  if (y.size() != rows()) throw DataError("label count does not match the feature matrix");
  for (int label : y)
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
  if (!x.allFinite()) throw DataError("feature matrix contains non-finite values");
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(y[rows[i]]);
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  if (predicted.size() != labels.size()) throw DataError("prediction count mismatch");
  if (labels.empty()) throw DataError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::optional<std::size_t> RawTable::find(const std::string& name) const {
  auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - column_names.begin());
}

std::size_t RawTable::missing_count(std::size_t column) const {
  return std::visit(
      [](const auto& cells) {
        return static_cast<std::size_t>(std::count_if(
            cells.begin(), cells.end(), [](const auto& c) { return !c.has_value(); }));
      },
      columns.at(column));
}

std::size_t RawTable::missing_count() const {
  std::size_t total = 0;
  for (std::size_t j = 0; j < columns.size(); ++j) total += missing_count(j);
  return total;
}

RawTable load_csv(const std::filesystem::path& path, const std::string& target_name,
                  const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, target_name, options);
}

RawTable parse_csv(std::istream& in, const std::string& target_name,
                   const CsvOptions& options) {
  // Skip a UTF-8 byte order mark.
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
    if (!(static_cast<unsigned char>(bom[1]) == 0xBB &&
          static_cast<unsigned char>(bom[2]) == 0xBF))
      throw DataError("unrecognized byte order mark");
  }

  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header) || is_blank_record(header)) throw DataError("missing header row");
  for (auto& h : header) h = trim(h);
  {
    std::set<std::string> seen;
    for (const auto& h : header)
      if (!seen.insert(h).second) throw DataError("duplicate column name '" + h + "'");
  }

  auto position = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto target_pos = position(target_name);
  if (!target_pos) throw DataError("target column '" + target_name + "' not in header");

  std::vector<std::size_t> keep;
  if (options.columns.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (j != *target_pos) keep.push_back(j);
  } else {
    for (const auto& name : options.columns) {
      if (name == target_name) continue;
      auto pos = position(name);
      if (!pos) throw DataError("feature column '" + name + "' not in header");
      if (std::find(keep.begin(), keep.end(), *pos) == keep.end()) keep.push_back(*pos);
    }
  }
  keep.push_back(*target_pos);

  const std::set<std::string> missing(options.missing_tokens.begin(),
                                      options.missing_tokens.end());
  std::vector<CategoricalCells> text(keep.size());
  std::vector<std::string> fields;
  std::size_t rows = 0;
  while (reader.next(fields)) {
    if (is_blank_record(fields)) continue;
    if (fields.size() != header.size())
      throw DataError("line " + std::to_string(reader.line()) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      std::string cell = trim(fields[keep[k]]);
      if (missing.count(cell)) {
        text[k].emplace_back(std::nullopt);
      } else {
        text[k].emplace_back(std::move(cell));
      }
    }
    ++rows;
  }
  if (rows == 0) throw DataError("no data rows");

  RawTable table;
  table.row_count = rows;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    table.column_names.push_back(header[keep[k]]);
    const bool is_target = keep[k] == *target_pos;
    NumericCells numbers;
    bool numeric = !is_target;
    bool any_value = false;
    if (numeric) {
      numbers.reserve(rows);
      for (const auto& cell : text[k]) {
        if (!cell) {
          numbers.emplace_back(std::nullopt);
          continue;
        }
        any_value = true;
        auto value = parse_number(*cell);
        if (!value) {
          numeric = false;
          break;
        }
        numbers.emplace_back(*value);
      }
    }
    // An all-missing column stays categorical; imputation reports it.
    if (numeric && any_value) {
      table.columns.emplace_back(std::move(numbers));
    } else {
      table.columns.emplace_back(std::move(text[k]));
    }
  }
  return table;
}

FeatureSchema infer_schema(const RawTable& table, const std::string& target_name) {
  FeatureSchema schema;
  schema.target = target_name;
  const auto target = table.find(target_name);
  if (!target) throw DataError("target column '" + target_name + "' not in table");
  schema.target_index = *target;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    std::vector<std::string> levels;
    if (const auto* cells = std::get_if<CategoricalCells>(&table.columns[j])) {
      schema.kinds.push_back(ColumnKind::kCategorical);
      std::set<std::string> seen;
      for (const auto& c : *cells)
        if (c && seen.insert(*c).second) levels.push_back(*c);
    } else {
      if (j == *target) throw DataError("target column must hold category labels");
      schema.kinds.push_back(ColumnKind::kNumeric);
    }
    schema.levels.push_back(std::move(levels));
  }
  if (schema.levels[*target].size() != 2)
    throw DataError("target '" + target_name + "' has " +
                    std::to_string(schema.levels[*target].size()) +
                    " distinct values, expected 2");
  return schema;
}

RawTable impute(const RawTable& table, const FeatureSchema& schema) {
  if (schema.kinds.size() != table.columns.size())
    throw DataError("schema does not cover every column");
  RawTable out = table;
  for (std::size_t j = 0; j < out.columns.size(); ++j) {
    if (j == schema.target_index) continue;
    if (table.missing_count(j) == 0) continue;
    if (table.missing_count(j) == table.row_count)
      throw DataError("column '" + table.column_names[j] + "' is entirely missing");
    if (auto* cells = std::get_if<NumericCells>(&out.columns[j])) {
      std::vector<double> observed;
      for (const auto& c : *cells)
        if (c) observed.push_back(*c);
      std::sort(observed.begin(), observed.end());
      const std::size_t m = observed.size();
      const double median =
          m % 2 == 1 ? observed[m / 2] : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
      for (auto& c : *cells)
        if (!c) c = median;
    } else {
      auto& text = std::get<CategoricalCells>(out.columns[j]);
      std::map<std::string, std::size_t> counts;
      for (const auto& c : text)
        if (c) ++counts[*c];
      // Scan levels in first-appearance order so ties keep the earliest.
      std::string mode;
      std::size_t best = 0;
      for (const auto& level : schema.levels[j]) {
        if (counts[level] > best) {
          best = counts[level];
          mode = level;
        }
      }
      for (auto& c : text)
        if (!c) c = mode;
    }
  }
  return out;
}

EncodedData encode(const RawTable& table, const FeatureSchema& schema) {
  if (schema.kinds.size() != table.columns.size())
    throw DataError("schema does not cover every column");
  EncodedData out;
  const std::size_t n = table.row_count;

  // Target mapping.
  const auto& target_cells = std::get<CategoricalCells>(table.columns[schema.target_index]);
  std::vector<std::string> target_levels = schema.levels[schema.target_index];
  if (target_levels.size() != 2)
    throw DataError("target has " + std::to_string(target_levels.size()) +
                    " levels, expected 2");
  auto a = parse_number(target_levels[0]);
  auto b = parse_number(target_levels[1]);
  std::string positive;
  if (a && b && std::min(*a, *b) == 0.0 && std::max(*a, *b) == 1.0) {
    positive = *a == 1.0 ? target_levels[0] : target_levels[1];
  } else {
    positive = std::max(target_levels[0], target_levels[1]);
  }
  out.target_positive_level = positive;
  out.target_negative_level = positive == target_levels[0] ? target_levels[1] : target_levels[0];
  out.data.y.reserve(n);
  for (const auto& c : target_cells) {
    if (!c) throw DataError("target column has missing values");
    out.data.y.push_back(*c == positive ? 1 : 0);
  }

  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j == schema.target_index) continue;
    const std::string& name = table.column_names[j];
    if (table.missing_count(j) != 0)
      throw DataError("column '" + name + "' has missing values; impute first");
    if (const auto* cells = std::get_if<NumericCells>(&table.columns[j])) {
      std::vector<double> col;
      col.reserve(n);
      for (const auto& c : *cells) col.push_back(*c);
      columns.push_back(std::move(col));
      out.columns.push_back({name, name, ""});
      continue;
    }
    const auto& text = std::get<CategoricalCells>(table.columns[j]);
    std::vector<std::string> levels = schema.levels[j];
    std::sort(levels.begin(), levels.end());
    if (levels.size() == 1) {
      out.warnings.push_back("column '" + name + "' has a single level '" + levels[0] +
                             "'; encoded as a constant");
      columns.emplace_back(n, 1.0);
      out.columns.push_back({name, name, levels[0]});
    } else if (levels.size() == 2) {
      std::vector<double> col;
      col.reserve(n);
      for (const auto& c : text) col.push_back(*c == levels[0] ? 1.0 : 0.0);
      columns.push_back(std::move(col));
      out.columns.push_back({name, name, levels[0]});
    } else {
      for (const auto& level : levels) {
        std::vector<double> col;
        col.reserve(n);
        for (const auto& c : text) col.push_back(*c == level ? 1.0 : 0.0);
        columns.push_back(std::move(col));
        out.columns.push_back({name + "=" + level, name, level});
      }
    }
  }

  out.data.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.data.feature_names.push_back(out.columns[j].name);
    for (std::size_t i = 0; i < n; ++i)
      out.data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
  }
  out.data.validate();
  return out;
}

std::size_t holdout_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 0.5));
}

TrainTestSplit split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test fraction must lie in (0, 1)");
  const std::size_t n = data.rows();
  const std::size_t n_test = holdout_count(n, test_fraction);
  if (n_test == 0 || n_test >= n)
    throw DataError("split of " + std::to_string(n) + " rows at fraction " +
                    std::to_string(test_fraction) + " leaves a partition empty");
  auto order = Rng::derive(seed, kSplitStream).permutation(n);
  TrainTestSplit out;
  out.train_rows.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
  out.test_rows.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
  out.train = data.select_rows(out.train_rows);
  out.test = data.select_rows(out.test_rows);
  return out;
}

ScalingParams fit_scaling(const Matrix& x) {
  if (x.rows() == 0) throw DataError("cannot fit scaling on an empty matrix");
  ScalingParams p;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    if (col.minCoeff() == col.maxCoeff()) {
      p.mean.push_back(col(0));
      p.std.push_back(0.0);
      p.constant.push_back(true);
      continue;
    }
    const double mean = col.sum() / n;
    const double var = (col.array() - mean).square().sum() / n;
    p.mean.push_back(mean);
    p.std.push_back(std::sqrt(var));
    p.constant.push_back(false);
  }
  return p;
}

Matrix ScalingParams::transform(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != mean.size())
    throw DataError("scaling width mismatch");
  Matrix z(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (constant[k]) {
      z.col(j) = (x.col(j).array() - mean[k]).matrix();
    } else {
      z.col(j) = ((x.col(j).array() - mean[k]) / std[k]).matrix();
    }
  }
  return z;
}

Matrix ScalingParams::inverse_transform(const Matrix& z) const {
  if (static_cast<std::size_t>(z.cols()) != mean.size())
    throw DataError("scaling width mismatch");
  Matrix x(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double scale = constant[k] ? 1.0 : std[k];
    x.col(j) = (z.col(j).array() * scale + mean[k]).matrix();
  }
  return x;
}

Standardized standardize(const Dataset& train, const Dataset& test) {
  if (train.rows() == 0) throw DataError("cannot standardize an empty training set");
  Standardized out;
  out.params = fit_scaling(train.x);
  out.train = train;
  out.test = test;
  out.train.x = out.params.transform(train.x);
  if (test.rows() > 0) out.test.x = out.params.transform(test.x);
  return out;
}

}  // namespace align_audit
