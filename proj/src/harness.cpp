// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "prunemi/entropy.hpp"
#include "prunemi/rng.hpp"

namespace prunemi {
namespace {

enum SeedStream : std::uint64_t {
  kInit = 101,
  kMaskSeed,
  kDenseTrain,
  kImpTrain,
  kSubnetTrain,
  kStudentInit,
  kFresh,
};

std::vector<std::size_t> with_io(std::size_t in, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return dims;
}

void check_keep(double keep) {
  if (!(keep > 0.0 && keep <= 1.0)) throw std::invalid_argument("keep must be in (0, 1]");
}

}  // namespace

double memorization_threshold(Loss loss) {
  return loss == Loss::kBinaryCrossEntropy ? std::log(2.0) / 10.0 : 0.01;
}

double memorized_fraction(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss) {
  const Vector l = per_example_loss(net.predict(X), y, loss);
  const double thr = memorization_threshold(loss);
  std::size_t hit = 0;
  for (Eigen::Index i = 0; i < l.size(); ++i) hit += l[i] <= thr ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(l.size());
}

Mask derive_mask(const MaskedMlp& net, const Dataset& data, PruneMethod method, double keep,
                 const TrainConfig& train_cfg, std::size_t synflow_iterations, double imp_drop_rate,
                 std::uint64_t seed) {
  check_keep(keep);
  switch (method) {
    case PruneMethod::kRandom:
      return prune_random(net, keep, derive_seed(seed, {kMaskSeed}));
    case PruneMethod::kMagnitudeInit:
      return prune_magnitude(net, keep, MagnitudeWhen::kAtInit);
    case PruneMethod::kSnip:
      return prune_snip(net, data.X, data.y, train_cfg.loss, keep);
    case PruneMethod::kGrasp:
      return prune_grasp(net, data.X, data.y, train_cfg.loss, keep);
    case PruneMethod::kSynflow:
      return prune_synflow(net, keep, synflow_iterations);
    case PruneMethod::kMagnitudeAfter: {
      MaskedMlp dense = net;
      TrainConfig tc = train_cfg;
      tc.seed = derive_seed(seed, {kDenseTrain});
      train(dense, data.X, data.y, tc);
      return prune_magnitude(dense, keep, MagnitudeWhen::kAfterTraining);
    }
    case PruneMethod::kImp: {
      MaskedMlp work = net;
      ImpConfig ic;
      ic.drop_rate = imp_drop_rate;
      ic.rounds = ImpConfig::rounds_for(keep, imp_drop_rate);
      ic.target_keep = keep;
      ic.train = train_cfg;
      ic.train.seed = derive_seed(seed, {kImpTrain});
      return run_imp(work, data.X, data.y, ic).mask;
    }
  }
  throw std::logic_error("unhandled pruning method");
}

TrainConfig default_memcap_train() {
  TrainConfig tc;
  tc.loss = Loss::kBinaryCrossEntropy;
  tc.optimizer = Optimizer::kSgd;
  tc.learning_rate = 1e-2;
  tc.batch_size = 1;
  tc.max_epochs = 300;
  tc.loss_tolerance = 0.01;
  return tc;
}

MemcapResult memorization_capacity(const MemcapConfig& cfg, const Dataset& data,
                                   PruneMethod method, double keep, std::uint64_t seed) {
  check_keep(keep);
  MaskedMlp net(with_io(data.dim(), cfg.hidden), derive_seed(seed, {kInit}), cfg.output_clip);

  Mask mask;
  if (method == PruneMethod::kMagnitudeAfter && !cfg.retrain_from_init) {
    // Keep the dense solution and continue training the surviving weights.
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seed, {kDenseTrain});
    train(net, data.X, data.y, tc);
    mask = prune_magnitude(net, keep, MagnitudeWhen::kAfterTraining);
  } else {
    mask = derive_mask(net, data, method, keep, cfg.train, cfg.synflow_iterations,
                       cfg.imp_drop_rate, seed);
  }

  MemcapResult res;
  res.kept = mask.count();
  if (mask.has_collapsed_layer()) {
    res.layer_collapse = true;
    return res;
  }
  net.set_mask(mask);
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(seed, {kSubnetTrain});
  const TrainTrace trace = train(net, data.X, data.y, tc);
  res.final_loss = trace.final_loss();
  res.fraction = memorized_fraction(net, data.X, data.y, cfg.train.loss);
  return res;
}

double noise_correlation(const MaskedMlp& net, const Dataset& data, const Matrix& fresh) {
  if (fresh.rows() == 0) throw std::invalid_argument("noise_correlation: need fresh samples");
  if (data.z.size() != static_cast<Eigen::Index>(data.size())) {
    throw std::invalid_argument("noise_correlation: dataset has no frozen noise vector");
  }
  const double population_mean = net.predict(fresh).mean();
  const Vector f = net.predict(data.X);
  return (f.array() - population_mean).matrix().dot(data.z) / static_cast<double>(data.size());
}

double noise_correlation(const MaskedMlp& net, const Dataset& data, std::size_t fresh_samples,
                         std::uint64_t seed) {
  if (!data.fresh_sampler) throw std::invalid_argument("noise_correlation: dataset has no fresh sampler");
  if (fresh_samples == 0) throw std::invalid_argument("noise_correlation: fresh_samples must be >= 1");
  return noise_correlation(net, data, data.fresh_sampler(fresh_samples, seed));
}

ImpTraceConfig default_imp_trace_config() {
  ImpTraceConfig cfg;
  cfg.train.loss = Loss::kMeanSquaredError;
  cfg.train.optimizer = Optimizer::kAdam;
  cfg.train.learning_rate = 1e-3;
  cfg.train.batch_size = 64;
  cfg.train.max_epochs = 100;
  cfg.train.loss_tolerance = 0.0;
  cfg.train.patience = 0;
  return cfg;
}

std::vector<ExperimentRecord> imp_correlation_trace(const ImpTraceConfig& cfg, std::uint64_t seed) {
  if (cfg.eval_every == 0) throw std::invalid_argument("eval_every must be >= 1");
  if (cfg.fresh_samples == 0) throw std::invalid_argument("fresh_samples must be >= 1");
  auto [data, teacher] = student_teacher(cfg.n, cfg.d, cfg.teacher, cfg.noise_var, seed);
  MaskedMlp net(with_io(cfg.d, cfg.student_hidden), derive_seed(seed, {kStudentInit}));
  const Matrix fresh = data.fresh_sampler(cfg.fresh_samples, derive_seed(seed, {kFresh}));
  const std::size_t E = cfg.train.max_epochs;

  std::vector<ExperimentRecord> out;
  auto emit = [&](std::size_t epoch, double keep, const MaskedMlp& m) {
    const auto e = static_cast<std::int64_t>(epoch);
    out.push_back({cfg.method_label, keep, seed, e, "noise_correlation",
                   noise_correlation(m, data, fresh)});
    out.push_back({cfg.method_label, keep, seed, e, "train_loss",
                   mean_loss(m, data.X, data.y, cfg.train.loss)});
  };
  auto due = [&](std::size_t e) { return e % cfg.eval_every == 0 || e == E; };

  if (cfg.rounds == 0) {
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seed, {kImpTrain});
    emit(0, 1.0, net);
    train(net, data.X, data.y, tc, [&](std::size_t e, const MaskedMlp& m) {
      if (due(e)) emit(e, 1.0, m);
    });
    return out;
  }

  ImpConfig ic;
  ic.drop_rate = cfg.drop_rate;
  ic.rounds = cfg.rounds;
  ic.train = cfg.train;
  ic.train.seed = derive_seed(seed, {kImpTrain});
  auto keep_before = [&](std::size_t r) {
    return std::pow(1.0 - cfg.drop_rate, static_cast<double>(r - 1));
  };
  ImpHooks hooks;
  hooks.on_round_start = [&](std::size_t r, const MaskedMlp& m) {
    emit((r - 1) * E, keep_before(r), m);
  };
  hooks.on_epoch = [&](std::size_t r, std::size_t e, const MaskedMlp& m) {
    if (due(e)) emit((r - 1) * E + e, keep_before(r), m);
  };
  hooks.on_finish = [&](const MaskedMlp& m) { emit(cfg.rounds * E, keep_before(cfg.rounds + 1), m); };
  run_imp(net, data.X, data.y, ic, hooks);
  return out;
}

std::vector<std::size_t> toy_layer_dims(Loss loss) {
  // 3-4-1: 12 + 4 weights and 4 + 1 biases, 21 parameters.
  // 3-3-1: 9 + 3 weights and 3 + 1 biases, 16 parameters.
  if (loss == Loss::kMeanSquaredError) return {3, 4, 1};
  return {3, 3, 1};
}

ToyMiConfig default_toy_mi_config(Loss loss) {
  ToyMiConfig cfg;
  cfg.loss = loss;
  cfg.train.loss = loss;
  cfg.train.optimizer = Optimizer::kSgd;
  cfg.train.learning_rate = 0.1;
  cfg.train.batch_size = 0;
  cfg.train.max_epochs = 300;
  cfg.train.loss_tolerance = 0.01;
  cfg.train.patience = 0;
  return cfg;
}

ToyMiResult toy_exact_mi(const ToyMiConfig& cfg, PruneMethod method, double keep,
                         std::uint64_t fixed_init_seed) {
  check_keep(keep);
  if (cfg.num_datasets == 0) throw std::invalid_argument("toy_exact_mi: num_datasets must be >= 1");
  TrainConfig tc = cfg.train;
  tc.loss = cfg.loss;
  const MaskedMlp init(toy_layer_dims(cfg.loss), fixed_init_seed);
  const std::uint64_t mask_seed = derive_seed(fixed_init_seed, {kMaskSeed});

  // The pruning methods only see the dataset as a set, so each sampled
  // dataset is canonicalized by sorting its rows; the mask of a canonical
  // dataset is computed once.
  std::unordered_map<std::uint64_t, std::size_t> mask_of_dataset;
  std::map<std::vector<std::uint8_t>, std::size_t> mask_id;
  std::vector<bool> mask_collapsed;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> prefix_counts;
  ToyMiResult res;

  for (std::size_t s = 0; s < cfg.num_datasets; ++s) {
    const Dataset raw = hypercube_toy(derive_seed(cfg.data_seed, {s}));
    std::array<std::pair<int, int>, 6> rows{};
    for (int i = 0; i < 6; ++i) {
      int corner = 0;
      for (int b = 0; b < 3; ++b) corner = (corner << 1) | (raw.X(i, b) > 0 ? 1 : 0);
      rows[static_cast<std::size_t>(i)] = {corner, raw.y[i] > 0 ? 1 : 0};
    }
    std::sort(rows.begin(), rows.end());
    std::uint64_t key = 0;
    for (const auto& [corner, label] : rows) key = (key << 4) | static_cast<std::uint64_t>(corner << 1 | label);

    auto it = mask_of_dataset.find(key);
    if (it == mask_of_dataset.end()) {
      Dataset canon = raw;
      for (int i = 0; i < 6; ++i) {
        const auto [corner, label] = rows[static_cast<std::size_t>(i)];
        for (int b = 0; b < 3; ++b) canon.X(i, b) = ((corner >> (2 - b)) & 1) ? 1.0 : -1.0;
        canon.y[i] = label ? 1.0 : -1.0;
      }
      canon.z = canon.y;
      const Mask m = derive_mask(init, canon, method, keep, tc, cfg.synflow_iterations,
                                 cfg.imp_drop_rate, mask_seed);
      auto [pos, inserted] = mask_id.emplace(m.bits, mask_id.size());
      if (inserted) {
        counts.push_back(0);
        prefix_counts.push_back(0);
        mask_collapsed.push_back(m.has_collapsed_layer());
      }
      it = mask_of_dataset.emplace(key, pos->second).first;
    }
    const std::size_t id = it->second;
    ++counts[id];
    if (s < cfg.prefix) ++prefix_counts[id];
    if (mask_collapsed[id]) ++res.collapsed;
  }

  res.entropy_bits = plugin_entropy(counts);
  std::vector<std::uint64_t> nonzero_prefix;
  for (auto c : prefix_counts) {
    if (c > 0) nonzero_prefix.push_back(c);
  }
  res.prefix_entropy_bits = nonzero_prefix.empty() ? res.entropy_bits : plugin_entropy(nonzero_prefix);
  res.unconverged = std::abs(res.entropy_bits - res.prefix_entropy_bits) >= 0.05;
  res.distinct_masks = counts.size();
  res.distinct_datasets = mask_of_dataset.size();
  return res;
}

}  // namespace prunemi
