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

#include "align_audit/neural_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "align_audit/error.hpp"
#include "align_audit/random.hpp"

namespace align_audit {

namespace {

constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kValidationStream = 12;
constexpr std::uint64_t kShuffleStream = 13;

constexpr double kProbabilityFloor = 1e-12;

using Activations = Eigen::MatrixXd;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Pre-activations of every layer for a batch (rows x units).
std::vector<Activations> forward(const MlpModel& model, const Matrix& x) {
  std::vector<Activations> z;
  z.reserve(model.layers.size());
  Activations a = x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    Activations pre = a * layer.weights;
    pre.rowwise() += layer.bias.transpose();
    if (l + 1 < model.layers.size()) a = pre.cwiseMax(0.0);
    z.push_back(std::move(pre));
  }
  return z;
}

double bce(double p, int y) {
  p = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

void check_batch(const MlpModel& model, const Matrix& x, const std::vector<int>& y) {
  if (static_cast<std::size_t>(x.cols()) != model.input_width())
    throw DataError("batch width does not match the network input");
  if (y.size() != static_cast<std::size_t>(x.rows()))
    throw DataError("label count does not match batch rows");
  if (x.rows() == 0) throw DataError("empty batch");
}

struct AdamState {
  std::vector<DenseLayer> m;
  std::vector<DenseLayer> v;
  long step = 0;
};

AdamState make_adam(const MlpModel& model) {
  AdamState s;
  for (const auto& layer : model.layers) {
    DenseLayer zero{Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                    Eigen::VectorXd::Zero(layer.bias.size())};
    s.m.push_back(zero);
    s.v.push_back(zero);
  }
  return s;
}

void adam_step(MlpModel& model, const MlpGradients& grad, AdamState& s, const MlpConfig& cfg) {
  ++s.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.step));
  const double lr = cfg.learning_rate;
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    param.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weights, grad.layers[l].weights, s.m[l].weights, s.v[l].weights);
    update(model.layers[l].bias, grad.layers[l].bias, s.m[l].bias, s.v[l].bias);
  }
}

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& rows, std::size_t begin,
                   std::size_t end) {
  Matrix out(static_cast<Eigen::Index>(end - begin), x.cols());
  for (std::size_t i = begin; i < end; ++i)
    out.row(static_cast<Eigen::Index>(i - begin)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& y, const std::vector<std::size_t>& rows,
                               std::size_t begin, std::size_t end) {
  std::vector<int> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(y[rows[i]]);
  return out;
}

}  // namespace

void MlpConfig::validate() const {
  if (hidden.empty()) throw ConfigError("MLP needs at least one hidden layer");
  for (std::size_t h : hidden)
    if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (max_epochs < 1) throw ConfigError("max epochs must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ConfigError("validation fraction must lie in (0, 1)");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

std::size_t MlpModel::input_width() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.rows());
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Vector MlpModel::predict_proba(const Matrix& rows) const {
  if (layers.empty()) throw DataError("network has no layers");
  if (static_cast<std::size_t>(rows.cols()) != input_width())
    throw DataError("row width " + std::to_string(rows.cols()) +
                    " does not match the network input width " +
                    std::to_string(input_width()));
  if (!rows.allFinite()) throw DataError("non-finite network input");
  const auto z = forward(*this, rows);
  const auto& logits = z.back();
  Vector p(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) p(i) = sigmoid(logits(i, 0));
  return p;
}

std::vector<int> MlpModel::predict(const Matrix& rows) const {
  const Vector p = predict_proba(rows);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= 0.5;
  return out;
}

MlpModel init_mlp(std::size_t inputs, const std::vector<std::size_t>& hidden,
                  std::uint64_t seed) {
  if (inputs < 1) throw ConfigError("network needs at least one input");
  Rng rng = Rng::derive(seed, kInitStream);
  MlpModel model;
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t fan_in = sizes[l];
    const std::size_t fan_out = sizes[l + 1];
    const bool output = l + 2 == sizes.size();
    const double bound =
        std::sqrt((output ? 2.0 : 6.0) / static_cast<double>(fan_in + fan_out));
    DenseLayer layer{Eigen::MatrixXd(fan_in, fan_out), Eigen::VectorXd(fan_out)};
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
        layer.weights(i, j) = rng.uniform(-bound, bound);
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) layer.bias(j) = rng.uniform(-bound, bound);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

double mlp_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& y) {
  check_batch(model, x, y);
  const Vector p = model.predict_proba(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) total += bce(p(i), y[static_cast<std::size_t>(i)]);
  return total / static_cast<double>(p.size());
}

MlpGradients mlp_gradients(const MlpModel& model, const Matrix& x, const std::vector<int>& y) {
  check_batch(model, x, y);
  const auto z = forward(model, x);
  const Eigen::Index batch = x.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);

  MlpGradients g;
  g.layers.resize(model.layers.size());
  Activations delta(batch, 1);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double p = sigmoid(z.back()(i, 0));
    const int label = y[static_cast<std::size_t>(i)];
    g.loss += bce(p, label);
    delta(i, 0) = (p - label) * inv_batch;
  }
  g.loss *= inv_batch;

  for (std::size_t l = model.layers.size(); l-- > 0;) {
    // Input activations of layer l.
    Activations input = l == 0 ? Activations(x) : Activations(z[l - 1].cwiseMax(0.0));
    g.layers[l].weights = input.transpose() * delta;
    g.layers[l].bias = delta.colwise().sum().transpose();
    if (l > 0) {
      Activations back = delta * model.layers[l].weights.transpose();
      delta = back.cwiseProduct((z[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

MlpModel fit_mlp(const Dataset& train, const MlpConfig& config) {
  config.validate();
  train.validate();
  if (train.rows() < 10) throw DataError("MLP training needs at least 10 rows");
  for (Eigen::Index j = 0; j < train.x.cols(); ++j) {
    const double mean = train.x.col(j).mean();
    if (std::abs(mean) > 1e-6)
      throw DataError("MLP training features must be standardized; '" +
                      train.feature_names[static_cast<std::size_t>(j)] + "' has mean " +
                      std::to_string(mean));
  }

  const std::size_t n = train.rows();
  std::vector<std::size_t> fit_rows(n);
  std::iota(fit_rows.begin(), fit_rows.end(), std::size_t{0});
  std::vector<std::size_t> val_rows;
  if (config.early_stopping) {
    const std::size_t n_val = holdout_count(n, config.validation_fraction);
    if (n_val == 0 || n_val >= n)
      throw DataError("validation fraction leaves a partition empty");
    auto order = Rng::derive(config.seed, kValidationStream).permutation(n);
    val_rows.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
    fit_rows.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  }
  const Matrix val_x = gather_rows(train.x, val_rows, 0, val_rows.size());
  const std::vector<int> val_y = gather_labels(train.y, val_rows, 0, val_rows.size());

  MlpModel model = init_mlp(train.features(), config.hidden, config.seed);
  AdamState adam = make_adam(model);
  Rng shuffle_rng = Rng::derive(config.seed, kShuffleStream);

  std::vector<DenseLayer> best_layers = model.layers;
  double best_score = -std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(fit_rows);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < fit_rows.size(); begin += config.batch_size) {
      const std::size_t end = std::min(fit_rows.size(), begin + config.batch_size);
      const Matrix bx = gather_rows(train.x, fit_rows, begin, end);
      const auto by = gather_labels(train.y, fit_rows, begin, end);
      const MlpGradients grad = mlp_gradients(model, bx, by);
      loss_sum += grad.loss * static_cast<double>(end - begin);
      adam_step(model, grad, adam, config);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / static_cast<double>(fit_rows.size());
    if (!std::isfinite(record.loss))
      throw TrainingError("MLP loss became non-finite at epoch " + std::to_string(epoch));

    if (!config.early_stopping) {
      model.history.push_back(record);
      model.best_epoch = epoch;
      continue;
    }
    const double score = accuracy(model.predict(val_x), val_y);
    record.validation_accuracy = score;
    model.history.push_back(record);
    if (score < best_score + config.tolerance) {
      ++stale_epochs;
    } else {
      stale_epochs = 0;
    }
    if (score > best_score) {
      best_score = score;
      best_layers = model.layers;
      model.best_epoch = epoch;
    }
    if (stale_epochs >= config.patience) {
      model.stopped_early = true;
      break;
    }
  }
  if (config.early_stopping) model.layers = std::move(best_layers);
  return model;
}

GradientCheck numerical_gradient_check(const MlpModel& model, const Matrix& x,
                                       const std::vector<int>& y, double step) {
  const MlpGradients analytic = mlp_gradients(model, x, y);
  MlpModel probe = model;
  GradientCheck result;
  auto compare = [&](double& param, double a) {
    const double saved = param;
    param = saved + step;
    const double up = mlp_loss(probe, x, y);
    param = saved - step;
    const double down = mlp_loss(probe, x, y);
    param = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double abs_err = std::abs(a - numeric);
    const double scale = std::max(std::abs(a), std::abs(numeric));
    const double rel_err = scale < 1e-10 ? abs_err : abs_err / scale;
    result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
    result.max_relative_error = std::max(result.max_relative_error, rel_err);
    ++result.parameters;
  };
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& w = probe.layers[l].weights;
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) compare(w(i, j), analytic.layers[l].weights(i, j));
    auto& b = probe.layers[l].bias;
    for (Eigen::Index i = 0; i < b.size(); ++i) compare(b(i), analytic.layers[l].bias(i));
  }
  return result;
}

}  // namespace align_audit
