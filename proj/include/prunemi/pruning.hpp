// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Mask derivation. Every one-shot method is a scoring function followed by
// global_rank_prune: keep the ceil(keep * p) highest scores over all layers,
// ties going to the lower flat index. Weights already removed by the
// network's current mask are never re-admitted.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prunemi/autodiff.hpp"
#include "prunemi/mask.hpp"
#include "prunemi/mlp.hpp"
#include "prunemi/train.hpp"

namespace prunemi {

enum class PruneMethod { kRandom, kMagnitudeInit, kMagnitudeAfter, kSnip, kGrasp, kSynflow, kImp };

PruneMethod parse_prune_method(std::string_view name);
std::string_view to_string(PruneMethod method) noexcept;
/// True for methods that never look at training data.
bool is_data_agnostic(PruneMethod method) noexcept;

/// ceil(keep * p), with a small guard so that e.g. 0.1 * 30 gives 3.
std::size_t keep_count(double keep, std::size_t p);

/// Keeps the ceil(keep * p) highest scores. NaN scores rank lowest.
/// `layer_offsets` is copied into the returned mask (may be empty).
Mask global_rank_prune(std::span<const double> scores, double keep,
                       std::vector<std::size_t> layer_offsets = {});

/// Same, but only positions with eligible[j] != 0 can be kept.
Mask global_rank_prune(std::span<const double> scores, double keep,
                       std::span<const std::uint8_t> eligible,
                       std::vector<std::size_t> layer_offsets);

// Scoring functions. Each returns one score per prunable weight, zero at
// weights the network currently masks.

/// |w| on the current weights, or on the initialization snapshot.
Vector magnitude_scores(const MaskedMlp& net, bool use_init_snapshot);
/// |w * dL/dw| on the given batch.
Vector snip_scores(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss);
/// -w * (H g) with g the loss gradient and H the loss Hessian on the batch.
Vector grasp_scores(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss);
/// |w * dR/dw| where R is the summed output of the network with every
/// parameter replaced by its absolute value, evaluated on an all-ones input.
Vector synflow_scores(const MaskedMlp& net);

Mask prune_random(const MaskedMlp& net, double keep, std::uint64_t seed);
Mask prune_snip(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss, double keep);
Mask prune_grasp(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss, double keep);
/// Iterative data-free pruning: round r prunes to keep^(r / iterations).
Mask prune_synflow(const MaskedMlp& net, double keep, std::size_t iterations = 100);

enum class MagnitudeWhen { kAtInit, kAfterTraining };
Mask prune_magnitude(const MaskedMlp& net, double keep, MagnitudeWhen when);

struct ImpConfig {
  double drop_rate = 0.2;   // fraction of the remaining weights removed per round
  std::size_t rounds = 0;   // number of train -> prune -> rewind rounds
  double target_keep = 0.0; // if > 0, no round prunes below this keep fraction
  TrainConfig train;        // per-round training; seed is re-derived per round

  void validate() const;
  /// Rounds needed to reach `keep` from dense at this drop rate.
  static std::size_t rounds_for(double keep, double drop_rate);
};

struct ImpRound {
  std::size_t round = 0;  // 1-based
  double keep = 1.0;      // keep fraction after this round's prune
  std::size_t kept = 0;
  double train_loss = 0.0;  // loss at the end of this round's training
  bool layer_collapse = false;
  Mask mask;
};

struct ImpResult {
  Mask mask;
  double keep = 1.0;
  std::vector<ImpRound> rounds;
};

struct ImpHooks {
  /// Called at the start of every round (round is 1-based) with the freshly
  /// rewound network, before training.
  std::function<void(std::size_t round, const MaskedMlp&)> on_round_start;
  /// Called after every training epoch.
  std::function<void(std::size_t round, std::size_t epoch, const MaskedMlp&)> on_epoch;
  /// Called after the final prune + rewind (the next round's start state).
  std::function<void(const MaskedMlp&)> on_finish;
};

/// Iterative magnitude pruning with rewinding to the initialization snapshot.
/// On return `net` carries the final mask and is rewound.
ImpResult run_imp(MaskedMlp& net, const Matrix& X, const Vector& y, const ImpConfig& cfg,
                  const ImpHooks& hooks = {});

}  // namespace prunemi
