// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "prunemi/autodiff.hpp"
#include "prunemi/mlp.hpp"

namespace prunemi {

enum class Optimizer { kSgd, kAdam };

Optimizer parse_optimizer(std::string_view name);
std::string_view to_string(Optimizer opt) noexcept;

struct TrainConfig {
  Loss loss = Loss::kBinaryCrossEntropy;
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-2;
  std::size_t batch_size = 0;  // 0 = full batch
  std::size_t max_epochs = 1000;
  // Stop once the epoch's training loss is at or below this value.
  double loss_tolerance = 0.01;
  // Stop once sign accuracy has been unchanged for this many consecutive
  // epochs. 0 disables the rule.
  std::size_t patience = 0;
  // Std of i.i.d. Gaussian noise added to every gradient coordinate.
  double gradient_noise_scale = 0.0;
  std::uint64_t seed = 0;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct EpochStat {
  std::size_t epoch = 0;  // 1-based; epoch 0 is never recorded
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainTrace {
  std::vector<EpochStat> epochs;
  bool converged = false;
  double final_loss() const { return epochs.empty() ? 0.0 : epochs.back().loss; }
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(std::size_t epoch, const std::string& detail);
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Called after every epoch with the epoch number (1-based) and the network.
using EpochCallback = std::function<void(std::size_t, const MaskedMlp&)>;

/// Trains in place. Masked weights get zero updates and stay zero; biases are
/// always trained. Deterministic given cfg.seed.
TrainTrace train(MaskedMlp& net, const Matrix& X, const Vector& y, const TrainConfig& cfg,
                 const EpochCallback& on_epoch = {});

}  // namespace prunemi
