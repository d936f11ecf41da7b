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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "align_audit/error.hpp"
#include "align_audit/neural_net.hpp"
#include "align_audit/random.hpp"

namespace align_audit {
namespace {

ModelFn linear(std::vector<double> w, double bias = 0.0) {
  return [w, bias](const Matrix& rows) {
    Vector out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      double s = bias;
      for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * rows(i, static_cast<Eigen::Index>(j));
      out(i) = s;
    }
    return out;
  };
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-2, 2);
  return m;
}

// Shapley values as the average marginal contribution over all feature
// orderings, with v(S) evaluated by direct masking.
Vector permutation_shapley(const ModelFn& f, const Vector& x, const Matrix& background) {
  const auto p = static_cast<std::size_t>(x.size());
  auto value = [&](const std::vector<bool>& in) {
    Matrix z = background;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      for (std::size_t j = 0; j < p; ++j)
        if (in[j]) z(i, static_cast<Eigen::Index>(j)) = x(static_cast<Eigen::Index>(j));
    return f(z).mean();
  };
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector phi = Vector::Zero(static_cast<Eigen::Index>(p));
  std::size_t count = 0;
  do {
    std::vector<bool> in(p, false);
    double previous = value(in);
    for (std::size_t j : order) {
      in[j] = true;
      double next = value(in);
      phi(static_cast<Eigen::Index>(j)) += next - previous;
      previous = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return phi / static_cast<double>(count);
}

TEST(KernelWeightTest, KnownValues) {
  EXPECT_DOUBLE_EQ(shapley_kernel_weight(4, 2), 0.125);
  EXPECT_DOUBLE_EQ(shapley_kernel_weight(3, 1), 1.0 / 3.0);
  for (std::size_t p = 2; p <= 12; ++p)
    for (std::size_t s = 1; s < p; ++s)
      EXPECT_DOUBLE_EQ(shapley_kernel_weight(p, s), shapley_kernel_weight(p, p - s));
  EXPECT_THROW(shapley_kernel_weight(4, 0), DataError);
  EXPECT_THROW(shapley_kernel_weight(4, 4), DataError);
}

TEST(MaskedPredictionTest, Cases) {
  ModelFn f = linear({1.0, -2.0, 0.5});
  Vector x(3);
  x << 1, 2, 3;
  Matrix bg(2, 3);
  bg << 0, 0, 0, 2, 4, 6;
  EXPECT_DOUBLE_EQ(masked_prediction(f, x, {true, true, true}, bg), f(x.transpose())(0));
  EXPECT_DOUBLE_EQ(masked_prediction(f, x, {false, false, false}, bg), f(bg).mean());
  Matrix z(1, 3);
  z << 5, 6, 7;
  // x on {0, 2}, z on {1}.
  EXPECT_DOUBLE_EQ(masked_prediction(f, x, {true, false, true}, z), 1.0 * 1 - 2.0 * 6 + 0.5 * 3);
  EXPECT_THROW(masked_prediction(f, x, {true, false, true}, Matrix(0, 3)), DataError);
}

TEST(ExplainInstanceTest, LinearModel) {
  Vector x(2);
  x << 1, 1;
  Matrix bg = Matrix::Zero(1, 2);
  InstanceExplanation e = explain_instance(linear({2, 3}), x, bg, ShapConfig{});
  EXPECT_NEAR(e.phi(0), 2.0, 1e-12);
  EXPECT_NEAR(e.phi(1), 3.0, 1e-12);
  EXPECT_NEAR(e.base_value, 0.0, 1e-12);
  EXPECT_TRUE(e.exact);
}

TEST(ExplainInstanceTest, ConstantModel) {
  ModelFn f = [](const Matrix& rows) { return Vector::Constant(rows.rows(), 4.5); };
  Rng rng(1);
  Matrix bg = random_matrix(10, 4, rng);
  InstanceExplanation e = explain_instance(f, bg.row(0).transpose(), bg, ShapConfig{});
  EXPECT_NEAR(e.base_value, 4.5, 1e-12);
  EXPECT_LT(e.phi.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExplainInstanceTest, SingleFeature) {
  Vector x(1);
  x << 3;
  Matrix bg(2, 1);
  bg << 0, 2;
  InstanceExplanation e = explain_instance(linear({2}), x, bg, ShapConfig{});
  EXPECT_NEAR(e.phi(0), 4.0, 1e-12);
}

TEST(ExactShapleyTest, AdditiveModel) {
  ModelFn f = [](const Matrix& rows) {
    Vector out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      out(i) = std::sin(rows(i, 0)) + rows(i, 1) * rows(i, 1) + std::exp(rows(i, 2));
    return out;
  };
  Vector x(3);
  x << 0.5, -1.0, 0.2;
  Matrix z(1, 3);
  z << -0.3, 0.4, 1.0;
  Vector phi = exact_shapley(f, x, z);
  EXPECT_NEAR(phi(0), std::sin(0.5) - std::sin(-0.3), 1e-12);
  EXPECT_NEAR(phi(1), 1.0 - 0.16, 1e-12);
  EXPECT_NEAR(phi(2), std::exp(0.2) - std::exp(1.0), 1e-12);
}

TEST(ExactShapleyTest, SymmetricFeatures) {
  ModelFn f = [](const Matrix& rows) {
    Vector out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      out(i) = rows(i, 0) * rows(i, 1) + std::tanh(rows(i, 0) + rows(i, 1)) + rows(i, 2);
    return out;
  };
  Vector x(3);
  x << 0.7, 0.7, -1.2;
  Matrix bg(2, 3);
  bg << 0.1, 0.1, 0.3, -0.5, -0.5, 0.9;
  Vector phi = exact_shapley(f, x, bg);
  EXPECT_NEAR(phi(0), phi(1), 1e-12);
  EXPECT_THROW(exact_shapley(f, Vector::Zero(13), Matrix::Zero(1, 13)), DataError);
}

// Random small networks and additive models over 3 to 6 features.
class RandomModelTest : public ::testing::TestWithParam<int> {};

TEST_P(RandomModelTest, KernelMatchesExactShapley) {
  const int trial = GetParam();
  Rng rng(1000 + static_cast<std::uint64_t>(trial));
  const auto p = static_cast<Eigen::Index>(3 + trial % 4);
  ModelFn f;
  if (trial % 2 == 0) {
    MlpModel net = init_mlp(static_cast<std::size_t>(p), {5, 3}, static_cast<std::uint64_t>(trial));
    f = [net](const Matrix& rows) { return net.predict_proba(rows); };
  } else {
    std::vector<double> a(static_cast<std::size_t>(p)), b(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      a[j] = rng.uniform(-2, 2);
      b[j] = rng.uniform(-1, 1);
    }
    f = [a, b](const Matrix& rows) {
      Vector out(rows.rows());
      for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < a.size(); ++j) {
          double v = rows(i, static_cast<Eigen::Index>(j));
          s += a[j] * v + b[j] * v * v;
        }
        out(i) = s;
      }
      return out;
    };
  }
  Matrix bg = random_matrix(1 + static_cast<Eigen::Index>(rng.uniform_index(6)), p, rng);
  Vector x = random_matrix(1, p, rng).row(0).transpose();
  InstanceExplanation e = explain_instance(f, x, bg, ShapConfig{});
  Vector exact = exact_shapley(f, x, bg);
  Vector oracle = permutation_shapley(f, x, bg);
  EXPECT_TRUE(e.exact);
  EXPECT_LE((e.phi - exact).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((exact - oracle).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(std::abs(e.base_value + e.phi.sum() - f(x.transpose())(0)), 1e-8);
  EXPECT_LE(e.residual, 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Models, RandomModelTest, ::testing::Range(0, 40));

TEST(ExplainInstanceTest, DummyFeatureGetsZero) {
  ModelFn f = [](const Matrix& rows) {
    Vector out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      out(i) = std::tanh(rows(i, 0) * rows(i, 2)) + rows(i, 3);
    return out;
  };
  Rng rng(4);
  Matrix bg = random_matrix(8, 4, rng);
  Vector x = random_matrix(1, 4, rng).row(0).transpose();
  InstanceExplanation e = explain_instance(f, x, bg, ShapConfig{});
  EXPECT_LE(std::abs(e.phi(1)), 1e-8);
}

TEST(ExplainInstanceTest, SamplingIsSeededAndNearExact) {
  const Eigen::Index p = 14;
  Rng rng(6);
  std::vector<double> w(static_cast<std::size_t>(p));
  for (double& v : w) v = rng.uniform(-1, 1);
  Matrix bg = random_matrix(4, p, rng);
  Vector x = random_matrix(1, p, rng).row(0).transpose();
  ShapConfig cfg;
  InstanceExplanation a = explain_instance(linear(w), x, bg, cfg, 3);
  InstanceExplanation b = explain_instance(linear(w), x, bg, cfg, 3);
  EXPECT_FALSE(a.exact);
  EXPECT_EQ(a.phi, b.phi);
  // Linear models are recovered exactly from any full-rank coalition set.
  for (Eigen::Index j = 0; j < p; ++j) {
    EXPECT_NEAR(a.phi(j), w[static_cast<std::size_t>(j)] * (x(j) - bg.col(j).mean()), 1e-8);
  }
}

TEST(ExplainTest, MatrixAndThreadsAgree) {
  MlpModel net = init_mlp(4, {6}, 9);
  ModelFn f = [net](const Matrix& rows) { return net.predict_proba(rows); };
  Rng rng(2);
  Matrix bg = random_matrix(10, 4, rng);
  Matrix xs = random_matrix(7, 4, rng);
  ShapConfig cfg;
  AttributionMatrix one = explain(f, xs, bg, cfg);
  cfg.threads = 3;
  AttributionMatrix many = explain(f, xs, bg, cfg, {10, 11, 12, 13, 14, 15, 16});
  EXPECT_EQ(one.phi, many.phi);
  EXPECT_EQ(many.instance_ids[2], 12u);
  EXPECT_LE(one.max_residual, 1e-8);
  EXPECT_NEAR(one.base_value, f(bg).mean(), 1e-12);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    EXPECT_NEAR(one.phi.row(i).sum() + one.base_value, one.outputs(i), 1e-8);
  }
}

TEST(BackgroundTest, SeededDistinctRows) {
  Matrix x(50, 1);
  for (Eigen::Index i = 0; i < 50; ++i) x(i, 0) = static_cast<double>(i);
  Matrix a = sample_background(x, 20, 7);
  EXPECT_EQ(a.rows(), 20);
  EXPECT_EQ(a, sample_background(x, 20, 7));
  std::vector<double> v(a.data(), a.data() + a.size());
  std::sort(v.begin(), v.end());
  EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
  EXPECT_EQ(sample_background(x, 100, 7).rows(), 50);
}

AttributionMatrix attributions(std::initializer_list<std::initializer_list<double>> rows) {
  AttributionMatrix a;
  a.phi = Matrix(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) a.phi(i, j++) = v;
    ++i;
  }
  return a;
}

TEST(AggregateTest, Cases) {
  ImportanceVector a = aggregate_importance(attributions({{-2, 1}}));
  EXPECT_NEAR(a.values[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.values[1], 1.0 / 3.0, 1e-15);
  EXPECT_FALSE(a.no_signal);
  ImportanceVector b = aggregate_importance(attributions({{1, 0}, {0, 1}}));
  EXPECT_DOUBLE_EQ(b.values[0], 0.5);
  EXPECT_DOUBLE_EQ(b.values[1], 0.5);
  ImportanceVector c = aggregate_importance(attributions({{0, 0, 0}}));
  EXPECT_TRUE(c.no_signal);
  for (double v : c.values) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  EXPECT_THROW(aggregate_importance(AttributionMatrix{}), DataError);
}

}  // namespace
}  // namespace align_audit
