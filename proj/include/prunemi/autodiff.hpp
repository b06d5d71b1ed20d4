// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Losses, reverse-mode gradients and Hessian-vector products for MaskedMlp.
// All quantities are for the mean loss over the batch. Losses require a
// single-output network.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "prunemi/mlp.hpp"

namespace prunemi {

enum class Loss {
  kMeanSquaredError,     // (f - y)^2
  kBinaryCrossEntropy,   // single logit, labels in {-1, +1} mapped to (y + 1) / 2
};

Loss parse_loss(std::string_view name);
std::string_view to_string(Loss loss) noexcept;

/// Thrown when a per-example loss is NaN or infinite.
class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(std::size_t sample_index, double value);
  std::size_t sample_index() const noexcept { return sample_index_; }

 private:
  std::size_t sample_index_;
};

/// Loss of each example given network outputs.
Vector per_example_loss(const Vector& outputs, const Vector& y, Loss loss);

double mean_loss(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss);

/// Fraction of examples whose output sign matches the label sign.
double sign_accuracy(const Vector& outputs, const Vector& y);

/// Gradient of the mean loss with respect to every parameter. Entries at
/// masked weights are exactly zero.
Vector gradient(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss);

/// Same as gradient() but also returns the mean loss.
Vector gradient(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss,
                double& loss_out);

/// H v for the Hessian H of the mean loss, computed by forward-mode
/// differentiation of the backward pass (directional derivative of the
/// gradient along v). v is masked before use and the result is masked.
Vector hvp(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss, const Vector& v);

/// Gradient of sum(forward(X)) with respect to the parameters, without a loss.
/// Used by data-free saliency scores.
Vector output_sum_gradient(const MaskedMlp& net, const Matrix& X);

}  // namespace prunemi
