// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Measurement pipelines: memorization capacity against sparsity, correlation
// with frozen label noise during training and IMP, and the exact mask entropy
// of a tiny model over the hypercube toy distribution.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prunemi/datagen.hpp"
#include "prunemi/mlp.hpp"
#include "prunemi/pruning.hpp"
#include "prunemi/records.hpp"
#include "prunemi/train.hpp"

namespace prunemi {

/// Per-example loss at or below which a training point counts as memorized:
/// log(2)/10 for cross-entropy, (1/10)^2 of the unit label scale for MSE.
double memorization_threshold(Loss loss);

/// Fraction of points whose per-example loss is at most the threshold.
double memorized_fraction(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss);

/// Cross-entropy, per-example SGD at lr 1e-2, 300 epochs, stop at loss 0.01.
TrainConfig default_memcap_train();

struct MemcapConfig {
  std::vector<std::size_t> hidden{20, 20};
  bool output_clip = false;
  TrainConfig train = default_memcap_train();  // seed is re-derived per phase
  std::size_t synflow_iterations = 100;
  double imp_drop_rate = 0.2;
  /// After-training methods: retrain the masked subnetwork from its rewound
  /// initialization (default) or keep training from the dense solution.
  bool retrain_from_init = true;
};

struct MemcapResult {
  double fraction = 0.0;
  bool layer_collapse = false;
  std::size_t kept = 0;
  double final_loss = 0.0;
};

/// Derives a mask with `method` at `keep` on a network initialized from
/// `seed`, trains the subnetwork, and measures memorization on `data`.
MemcapResult memorization_capacity(const MemcapConfig& cfg, const Dataset& data,
                                   PruneMethod method, double keep, std::uint64_t seed);

/// (1/n) sum_i (f(x_i) - mean_fresh f) z_i, with the population mean
/// estimated on `fresh_samples` draws from the dataset's fresh sampler.
double noise_correlation(const MaskedMlp& net, const Dataset& data, std::size_t fresh_samples,
                         std::uint64_t seed);

/// Same, with the fresh covariates supplied by the caller.
double noise_correlation(const MaskedMlp& net, const Dataset& data, const Matrix& fresh);

struct ImpTraceConfig {
  std::size_t n = 1000;
  std::size_t d = 50;
  double noise_var = 1.0;
  TeacherSpec teacher;
  std::vector<std::size_t> student_hidden{100, 100, 100, 100};
  TrainConfig train;  // per-round training; defaults set by default_imp_trace_config()
  double drop_rate = 0.2;
  /// Number of IMP rounds. 0 means a single unpruned training run (used for
  /// learning-rate and gradient-noise sweeps).
  std::size_t rounds = 20;
  std::size_t fresh_samples = 10000;
  /// Evaluate the correlation every this many epochs (always at round start
  /// and round end).
  std::size_t eval_every = 1;
  std::string method_label = "imp";
};

ImpTraceConfig default_imp_trace_config();

/// Runs IMP on a student-teacher task generated from `seed` and records
/// "noise_correlation" (and "train_loss") against a global epoch counter.
/// Round r covers epochs (r-1)E+1 .. rE; the record at epoch (r-1)E carries
/// the post-prune state entering round r.
std::vector<ExperimentRecord> imp_correlation_trace(const ImpTraceConfig& cfg, std::uint64_t seed);

struct ToyMiConfig {
  Loss loss = Loss::kMeanSquaredError;
  std::size_t num_datasets = 32000;
  std::size_t prefix = 1000;  // also report the entropy of the first `prefix` samples
  TrainConfig train;          // defaults set by default_toy_mi_config()
  std::size_t synflow_iterations = 100;
  double imp_drop_rate = 0.2;
  std::uint64_t data_seed = 0;
};

ToyMiConfig default_toy_mi_config(Loss loss);

/// Layer sizes of the toy model: 3-4-1 for MSE, 3-3-1 for cross-entropy.
std::vector<std::size_t> toy_layer_dims(Loss loss);

struct ToyMiResult {
  double entropy_bits = 0.0;         // over all sampled datasets
  double prefix_entropy_bits = 0.0;  // over the first `prefix` datasets
  bool unconverged = false;          // the two estimates differ by >= 0.05 bits
  std::size_t distinct_masks = 0;
  std::size_t distinct_datasets = 0;
  std::size_t collapsed = 0;         // sampled datasets whose mask collapsed a layer
};

/// Plug-in entropy of the mask produced by `method` at `keep` from a fixed
/// initialization, over `num_datasets` sampled hypercube toy datasets.
ToyMiResult toy_exact_mi(const ToyMiConfig& cfg, PruneMethod method, double keep,
                         std::uint64_t fixed_init_seed);

/// Mask produced by `method` on `data` from `net`'s current state (used by
/// the toy harness; exposed for tests).
Mask derive_mask(const MaskedMlp& net, const Dataset& data, PruneMethod method, double keep,
                 const TrainConfig& train, std::size_t synflow_iterations, double imp_drop_rate,
                 std::uint64_t seed);

}  // namespace prunemi
