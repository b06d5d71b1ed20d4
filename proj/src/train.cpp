// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "prunemi/rng.hpp"

namespace prunemi {

Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adam") return Optimizer::kAdam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

std::string_view to_string(Optimizer opt) noexcept { return opt == Optimizer::kSgd ? "sgd" : "adam"; }

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(gradient_noise_scale >= 0.0)) throw std::invalid_argument("gradient_noise_scale must be >= 0");
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be >= 1");
}

TrainingDivergedError::TrainingDivergedError(std::size_t epoch, const std::string& detail)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ": " + detail),
      epoch_(epoch) {}

TrainTrace train(MaskedMlp& net, const Matrix& X, const Vector& y, const TrainConfig& cfg,
                 const EpochCallback& on_epoch) {
  cfg.validate();
  if (X.rows() == 0) throw ShapeError("train: empty dataset");
  if (X.rows() != y.size()) throw ShapeError("train: X and y row counts differ");

  const auto n = static_cast<std::size_t>(X.rows());
  const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size >= n) ? n : cfg.batch_size;
  const bool full_batch = batch == n;

  Rng rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const Eigen::Index p = static_cast<Eigen::Index>(net.num_params());
  Vector m1 = Vector::Zero(p);
  Vector m2 = Vector::Zero(p);
  std::size_t step = 0;

  TrainTrace trace;
  double last_accuracy = -1.0;
  std::size_t unchanged = 0;

  Matrix xb;
  Vector yb;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (!full_batch) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      Vector g;
      try {
        if (full_batch) {
          g = gradient(net, X, y, cfg.loss);
        } else {
          std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                        order.begin() + static_cast<std::ptrdiff_t>(stop));
          xb = X(idx, Eigen::all);
          yb = y(idx);
          g = gradient(net, xb, yb, cfg.loss);
        }
      } catch (const NonFiniteLossError& e) {
        throw TrainingDivergedError(epoch, e.what());
      }
      if (cfg.gradient_noise_scale > 0.0) {
        for (Eigen::Index k = 0; k < p; ++k) g[k] += cfg.gradient_noise_scale * gauss(rng);
      }
      ++step;
      Vector next = net.params();
      if (cfg.optimizer == Optimizer::kSgd) {
        next -= cfg.learning_rate * g;
      } else {
        m1 = cfg.adam_beta1 * m1 + (1.0 - cfg.adam_beta1) * g;
        m2 = cfg.adam_beta2 * m2 + (1.0 - cfg.adam_beta2) * g.cwiseAbs2();
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
        next.array() -= cfg.learning_rate * (m1.array() / c1) /
                        ((m2.array() / c2).sqrt() + cfg.adam_eps);
      }
      net.set_params(next);  // re-applies the mask
    }

    const Vector out = net.predict(X);
    double loss = 0.0;
    try {
      loss = per_example_loss(out, y, cfg.loss).mean();
    } catch (const NonFiniteLossError& e) {
      throw TrainingDivergedError(epoch, e.what());
    }
    if (!std::isfinite(loss)) throw TrainingDivergedError(epoch, "mean loss is not finite");
    const double acc = sign_accuracy(out, y);
    trace.epochs.push_back({epoch, loss, acc});
    if (on_epoch) on_epoch(epoch, net);

    if (loss <= cfg.loss_tolerance) {
      trace.converged = true;
      break;
    }
    if (cfg.patience > 0) {
      unchanged = (acc == last_accuracy) ? unchanged + 1 : 0;
      last_accuracy = acc;
      if (unchanged >= cfg.patience) {
        trace.converged = true;
        break;
      }
    }
  }
  return trace;
}

}  // namespace prunemi
