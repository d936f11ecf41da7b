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

#ifndef ALIGN_AUDIT_NEURAL_NET_HPP_
#define ALIGN_AUDIT_NEURAL_NET_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "align_audit/tabular_data.hpp"
#include "align_audit/types.hpp"

namespace align_audit {

struct MlpConfig {
  std::vector<std::size_t> hidden = {128, 64, 16};
  double learning_rate = 1e-3;
  // One epoch is one pass over the (non-validation) training rows.
  int max_epochs = 400;
  bool early_stopping = true;
  double validation_fraction = 0.1;
  int patience = 10;
  double tolerance = 1e-4;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;

  // Adam constants.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// y = x * weights + bias, with weights shaped (inputs x outputs).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

struct EpochRecord {
  int epoch = 0;
  // Mean binary cross-entropy over the epoch's minibatches.
  double loss = 0.0;
  std::optional<double> validation_accuracy;
};

// Feed-forward network: ReLU hidden layers and one sigmoid output unit.
// Immutable once trained; prediction is const and re-entrant.
struct MlpModel {
  std::vector<DenseLayer> layers;
  std::vector<EpochRecord> history;
  // 1-based epoch whose weights were kept.
  int best_epoch = 0;
  bool stopped_early = false;
  // Statistics the inputs were standardized with, when known.
  std::optional<ScalingParams> scaling;

  std::size_t input_width() const;
  std::size_t parameter_count() const;

  // Sigmoid outputs in (0, 1). Throws DataError on a width mismatch or
  // non-finite input.
  Vector predict_proba(const Matrix& rows) const;
  // Probability >= 0.5.
  std::vector<int> predict(const Matrix& rows) const;
};

// Glorot-uniform weights: bound sqrt(6 / (fan_in + fan_out)) for ReLU layers
// and sqrt(2 / (fan_in + fan_out)) for the sigmoid output. Biases are drawn
// from the same range.
MlpModel init_mlp(std::size_t inputs, const std::vector<std::size_t>& hidden,
                  std::uint64_t seed);

// Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
double mlp_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& y);

// Loss and its gradient, one DenseLayer of partial derivatives per layer.
struct MlpGradients {
  double loss = 0.0;
  std::vector<DenseLayer> layers;
};
MlpGradients mlp_gradients(const MlpModel& model, const Matrix& x, const std::vector<int>& y);

// Minibatch Adam on mean binary cross-entropy. With early stopping, a seeded
// validation_fraction of the rows is held out once; training stops after
// patience epochs without a validation-accuracy gain above tolerance and
// the best epoch's weights are restored. Throws TrainingError when the loss
// becomes non-finite.
MlpModel fit_mlp(const Dataset& train, const MlpConfig& config = {});

struct GradientCheck {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t parameters = 0;
};

// Compares mlp_gradients against central differences of mlp_loss, one
// parameter at a time. Relative error is |a - n| / max(|a|, |n|), or the
// absolute error when both are below 1e-10.
GradientCheck numerical_gradient_check(const MlpModel& model, const Matrix& x,
                                       const std::vector<int>& y, double step = 1e-5);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_NEURAL_NET_HPP_
