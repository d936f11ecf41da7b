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

#include "align_audit/kernel_shap.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "align_audit/error.hpp"
#include "align_audit/random.hpp"

namespace align_audit {

namespace {

constexpr std::uint64_t kBackgroundStream = 21;
constexpr std::uint64_t kCoalitionStream = 22;
constexpr std::size_t kExactLimit = 12;
// Upper bound on rows per model call.
constexpr Eigen::Index kMaxBatchRows = 16384;

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

Coalition from_bits(std::uint64_t bits, std::size_t p) {
  Coalition c(p);
  for (std::size_t j = 0; j < p; ++j) c[j] = (bits >> j) & 1U;
  return c;
}

void check_inputs(const Vector& x, const Matrix& background) {
  if (background.rows() == 0) throw DataError("background sample is empty");
  if (background.cols() != x.size())
    throw DataError("background width does not match the explained row");
}

// Weighted least squares on the reduced problem. Rows of `design` hold
// z_j - z_last for j < last, targets hold v(S) - v(empty) - z_last * delta.
Vector solve_constrained(const std::vector<Coalition>& coalitions,
                         const std::vector<double>& values, const std::vector<double>& weights,
                         double base, double delta, std::size_t p) {
  Vector phi(static_cast<Eigen::Index>(p));
  if (p == 1) {
    phi(0) = delta;
    return phi;
  }
  const std::size_t m = coalitions.size();
  const std::size_t last = p - 1;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(last));
  Eigen::VectorXd target(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const double sw = std::sqrt(weights[k]);
    const double z_last = coalitions[k][last] ? 1.0 : 0.0;
    for (std::size_t j = 0; j < last; ++j)
      design(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          sw * ((coalitions[k][j] ? 1.0 : 0.0) - z_last);
    target(static_cast<Eigen::Index>(k)) = sw * (values[k] - base - z_last * delta);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(last))
    throw TrainingError("KernelSHAP normal equations are singular (" + std::to_string(m) +
                        " distinct coalitions for " + std::to_string(last) + " unknowns)");
  const Eigen::VectorXd head = qr.solve(target);
  phi.head(static_cast<Eigen::Index>(last)) = head;
  phi(static_cast<Eigen::Index>(last)) = delta - head.sum();
  return phi;
}

}  // namespace

void ShapConfig::validate(std::size_t features) const {
  if (background_size < 1) throw ConfigError("background size must be >= 1");
  if (features > enumeration_limit && sampled_coalitions < features + 2)
    throw ConfigError("coalition budget must be at least the feature count + 2");
}

double shapley_kernel_weight(std::size_t p, std::size_t s) {
  if (s == 0 || s >= p)
    throw DataError("kernel weight is defined for coalition sizes 1..p-1");
  return static_cast<double>(p - 1) /
         (binomial(p, s) * static_cast<double>(s) * static_cast<double>(p - s));
}

Matrix sample_background(const Matrix& x, std::size_t size, std::uint64_t seed) {
  if (x.rows() == 0) throw DataError("cannot sample a background from no rows");
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t k = std::min(size, n);
  const auto rows = Rng::derive(seed, kBackgroundStream).sample_without_replacement(n, k);
  Matrix out(static_cast<Eigen::Index>(k), x.cols());
  for (std::size_t i = 0; i < k; ++i)
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<double> coalition_values(const ModelFn& model, const Vector& x,
                                     const std::vector<Coalition>& coalitions,
                                     const Matrix& background) {
  check_inputs(x, background);
  const Eigen::Index b = background.rows();
  const Eigen::Index p = background.cols();
  const std::size_t per_call =
      std::max<std::size_t>(1, static_cast<std::size_t>(kMaxBatchRows / b));
  std::vector<double> values(coalitions.size());
  Matrix batch;
  for (std::size_t begin = 0; begin < coalitions.size(); begin += per_call) {
    const std::size_t end = std::min(coalitions.size(), begin + per_call);
    batch.resize(static_cast<Eigen::Index>(end - begin) * b, p);
    for (std::size_t k = begin; k < end; ++k) {
      const auto& c = coalitions[k];
      if (c.size() != static_cast<std::size_t>(p))
        throw DataError("coalition size does not match the feature count");
      auto block = batch.middleRows(static_cast<Eigen::Index>(k - begin) * b, b);
      block = background;
      for (Eigen::Index j = 0; j < p; ++j)
        if (c[static_cast<std::size_t>(j)]) block.col(j).setConstant(x(j));
    }
    const Vector out = model(batch);
    if (out.size() != batch.rows()) throw TrainingError("model returned the wrong output count");
    for (std::size_t k = begin; k < end; ++k)
      values[k] = out.segment(static_cast<Eigen::Index>(k - begin) * b, b).mean();
  }
  return values;
}

double masked_prediction(const ModelFn& model, const Vector& x, const Coalition& coalition,
                         const Matrix& background) {
  return coalition_values(model, x, {coalition}, background).front();
}

InstanceExplanation explain_instance(const ModelFn& model, const Vector& x,
                                     const Matrix& background, const ShapConfig& config,
                                     std::uint64_t stream) {
  check_inputs(x, background);
  const std::size_t p = static_cast<std::size_t>(x.size());
  if (p == 0) throw DataError("nothing to explain: zero features");
  config.validate(p);

  InstanceExplanation out;
  const auto ends = coalition_values(model, x, {Coalition(p, false), Coalition(p, true)}, background);
  out.base_value = ends[0];
  out.output = ends[1];
  const double delta = out.output - out.base_value;

  std::vector<Coalition> coalitions;
  std::vector<double> weights;
  if (p <= config.enumeration_limit) {
    out.exact = true;
    const std::uint64_t full = (std::uint64_t{1} << p) - 1;
    for (std::uint64_t bits = 1; bits < full; ++bits) {
      const auto s = static_cast<std::size_t>(std::popcount(bits));
      coalitions.push_back(from_bits(bits, p));
      weights.push_back(shapley_kernel_weight(p, s));
    }
  } else {
    Rng rng = Rng::derive(config.seed, kCoalitionStream + (stream << 8));
    std::vector<double> size_mass(p);
    for (std::size_t s = 1; s < p; ++s)
      size_mass[s] = 1.0 / (static_cast<double>(s) * static_cast<double>(p - s));
    const double total = std::accumulate(size_mass.begin(), size_mass.end(), 0.0);
    std::map<Coalition, std::size_t> draws;
    for (std::size_t d = 0; d < config.sampled_coalitions; ++d) {
      double u = rng.uniform01() * total;
      std::size_t s = 1;
      while (s + 1 < p && u >= size_mass[s]) {
        u -= size_mass[s];
        ++s;
      }
      Coalition c(p, false);
      for (std::size_t j : rng.sample_without_replacement(p, s)) c[j] = true;
      ++draws[c];
    }
    for (auto& [c, count] : draws) {
      coalitions.push_back(c);
      weights.push_back(static_cast<double>(count));
    }
  }
  out.coalitions = coalitions.size();
  const auto values = coalition_values(model, x, coalitions, background);
  out.phi = solve_constrained(coalitions, values, weights, out.base_value, delta, p);
  out.residual = std::abs(out.base_value + out.phi.sum() - out.output);
  return out;
}

Vector exact_shapley(const ModelFn& model, const Vector& x, const Matrix& background) {
  check_inputs(x, background);
  const std::size_t p = static_cast<std::size_t>(x.size());
  if (p == 0) throw DataError("nothing to explain: zero features");
  if (p > kExactLimit)
    throw DataError("exact Shapley values are limited to " + std::to_string(kExactLimit) +
                    " features");
  const std::uint64_t count = std::uint64_t{1} << p;
  std::vector<Coalition> all;
  all.reserve(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) all.push_back(from_bits(bits, p));
  const auto v = coalition_values(model, x, all, background);

  std::vector<double> factorial(p + 1, 1.0);
  for (std::size_t i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  Vector phi = Vector::Zero(static_cast<Eigen::Index>(p));
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    const auto s = static_cast<std::size_t>(std::popcount(bits));
    if (s == p) continue;
    const double w = factorial[s] * factorial[p - s - 1] / factorial[p];
    for (std::size_t j = 0; j < p; ++j) {
      const std::uint64_t bit = std::uint64_t{1} << j;
      if (bits & bit) continue;
      phi(static_cast<Eigen::Index>(j)) += w * (v[bits | bit] - v[bits]);
    }
  }
  return phi;
}

AttributionMatrix explain(const ModelFn& model, const Matrix& instances,
                          const Matrix& background, const ShapConfig& config,
                          std::vector<std::size_t> instance_ids) {
  const auto n = static_cast<std::size_t>(instances.rows());
  if (n == 0) throw DataError("no instances to explain");
  if (instance_ids.empty()) {
    instance_ids.resize(n);
    std::iota(instance_ids.begin(), instance_ids.end(), std::size_t{0});
  }
  if (instance_ids.size() != n) throw DataError("instance id count does not match rows");
  config.validate(static_cast<std::size_t>(instances.cols()));

  AttributionMatrix out;
  out.phi.resize(instances.rows(), instances.cols());
  out.outputs.resize(instances.rows());
  out.instance_ids = std::move(instance_ids);
  std::vector<double> bases(n), residuals(n);
  std::vector<char> exact(n);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Vector x = instances.row(static_cast<Eigen::Index>(i)).transpose();
        const auto e = explain_instance(model, x, background, config, i);
        out.phi.row(static_cast<Eigen::Index>(i)) = e.phi.transpose();
        out.outputs(static_cast<Eigen::Index>(i)) = e.output;
        bases[i] = e.base_value;
        residuals[i] = e.residual;
        exact[i] = e.exact;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::size_t threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = std::clamp<std::size_t>(threads, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // The base value depends only on the background, so every instance agrees.
  out.base_value = bases.front();
  out.max_residual = *std::max_element(residuals.begin(), residuals.end());
  out.exact = std::all_of(exact.begin(), exact.end(), [](char e) { return e != 0; });
  return out;
}

ImportanceVector aggregate_importance(const AttributionMatrix& attributions) {
  if (attributions.phi.rows() == 0 || attributions.phi.cols() == 0)
    throw DataError("no attributions to aggregate");
  ImportanceVector out;
  const Eigen::VectorXd mean_abs = attributions.phi.cwiseAbs().colwise().mean().transpose();
  const double sum = mean_abs.sum();
  out.values.resize(static_cast<std::size_t>(mean_abs.size()));
  if (sum == 0.0) {
    std::fill(out.values.begin(), out.values.end(), 1.0 / static_cast<double>(out.values.size()));
    out.no_signal = true;
    return out;
  }
  for (Eigen::Index j = 0; j < mean_abs.size(); ++j)
    out.values[static_cast<std::size_t>(j)] = mean_abs(j) / sum;
  return out;
}

}  // namespace align_audit
