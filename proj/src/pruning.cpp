// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "prunemi/log.hpp"
#include "prunemi/rng.hpp"

namespace prunemi {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_keep(double keep) {
  if (!(keep > 0.0 && keep <= 1.0)) {
    throw std::invalid_argument("keep fraction must be in (0, 1], got " + std::to_string(keep));
  }
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Mask rank_with_current_mask(const MaskedMlp& net, const Vector& scores, double keep) {
  return global_rank_prune(as_span(scores), keep, net.mask().bits, net.mask().layer_offsets);
}

std::size_t nonzero_eligible(const MaskedMlp& net, const Vector& scores) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < net.num_weights(); ++j) {
    n += (net.mask().bits[j] != 0 && scores[static_cast<Eigen::Index>(j)] != 0.0) ? 1 : 0;
  }
  return n;
}

void warn_if_degenerate(const MaskedMlp& net, const Vector& scores, double keep, std::string_view who) {
  const std::size_t want = keep_count(keep, net.num_weights());
  const std::size_t have = nonzero_eligible(net, scores);
  // Keeping every eligible weight involves no ranking, so zeros do not matter.
  if (have < want && want < net.mask().count()) {
    warn(std::string(who) + ": only " + std::to_string(have) + " nonzero scores for " +
         std::to_string(want) + " kept weights; remaining slots filled by index order");
  }
}

}  // namespace

PruneMethod parse_prune_method(std::string_view name) {
  if (name == "random") return PruneMethod::kRandom;
  if (name == "magnitude_init" || name == "magnitude-init") return PruneMethod::kMagnitudeInit;
  if (name == "magnitude_after" || name == "magnitude-after") return PruneMethod::kMagnitudeAfter;
  if (name == "snip") return PruneMethod::kSnip;
  if (name == "grasp") return PruneMethod::kGrasp;
  if (name == "synflow") return PruneMethod::kSynflow;
  if (name == "imp") return PruneMethod::kImp;
  throw std::invalid_argument("unknown pruning method '" + std::string(name) + "'");
}

std::string_view to_string(PruneMethod method) noexcept {
  switch (method) {
    case PruneMethod::kRandom: return "random";
    case PruneMethod::kMagnitudeInit: return "magnitude_init";
    case PruneMethod::kMagnitudeAfter: return "magnitude_after";
    case PruneMethod::kSnip: return "snip";
    case PruneMethod::kGrasp: return "grasp";
    case PruneMethod::kSynflow: return "synflow";
    case PruneMethod::kImp: return "imp";
  }
  return "unknown";
}

bool is_data_agnostic(PruneMethod method) noexcept {
  return method == PruneMethod::kRandom || method == PruneMethod::kMagnitudeInit ||
         method == PruneMethod::kSynflow;
}

std::size_t keep_count(double keep, std::size_t p) {
  check_keep(keep);
  const double raw = keep * static_cast<double>(p);
  const auto c = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::min(p, std::max<std::size_t>(c, 1));
}

Mask global_rank_prune(std::span<const double> scores, double keep,
                       std::vector<std::size_t> layer_offsets) {
  const std::vector<std::uint8_t> all(scores.size(), 1);
  return global_rank_prune(scores, keep, all, std::move(layer_offsets));
}

Mask global_rank_prune(std::span<const double> scores, double keep,
                       std::span<const std::uint8_t> eligible,
                       std::vector<std::size_t> layer_offsets) {
  if (eligible.size() != scores.size()) throw std::invalid_argument("eligible size mismatch");
  const std::size_t want = keep_count(keep, scores.size());
  std::vector<std::size_t> idx;
  idx.reserve(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (eligible[j] != 0) idx.push_back(j);
  }
  auto key = [&](std::size_t j) { return std::isnan(scores[j]) ? kNegInf : scores[j]; };
  auto better = [&](std::size_t a, std::size_t b) {
    const double ka = key(a);
    const double kb = key(b);
    return ka > kb || (ka == kb && a < b);
  };
  const std::size_t take = std::min(want, idx.size());
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), better);
  Mask m;
  m.bits.assign(scores.size(), 0);
  for (std::size_t k = 0; k < take; ++k) m.bits[idx[k]] = 1;
  if (layer_offsets.empty()) layer_offsets = {0, scores.size()};
  m.layer_offsets = std::move(layer_offsets);
  return m;
}

Vector magnitude_scores(const MaskedMlp& net, bool use_init_snapshot) {
  const Vector& src = use_init_snapshot ? net.init_snapshot() : net.params();
  return net.gather_weights(src.cwiseProduct(net.param_mask())).cwiseAbs();
}

Vector snip_scores(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss) {
  const Vector g = gradient(net, X, y, loss);
  return net.gather_weights(net.params().cwiseProduct(g)).cwiseAbs();
}

Vector grasp_scores(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss) {
  const Vector g = gradient(net, X, y, loss);
  const Vector hg = hvp(net, X, y, loss, g);
  return -net.gather_weights(net.params().cwiseProduct(hg));
}

Vector synflow_scores(const MaskedMlp& net) {
  MaskedMlp linear = net;
  linear.set_output_clip(false);
  linear.set_params(net.params().cwiseAbs());
  const Matrix ones = Matrix::Ones(1, static_cast<Eigen::Index>(net.input_dim()));
  const Vector g = output_sum_gradient(linear, ones);
  return linear.gather_weights(linear.params().cwiseProduct(g)).cwiseAbs();
}

Mask prune_random(const MaskedMlp& net, double keep, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector scores(static_cast<Eigen::Index>(net.num_weights()));
  for (Eigen::Index j = 0; j < scores.size(); ++j) scores[j] = uni(rng);
  return rank_with_current_mask(net, scores, keep);
}

Mask prune_snip(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss, double keep) {
  const Vector s = snip_scores(net, X, y, loss);
  warn_if_degenerate(net, s, keep, "snip");
  return rank_with_current_mask(net, s, keep);
}

Mask prune_grasp(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss, double keep) {
  const Vector s = grasp_scores(net, X, y, loss);
  warn_if_degenerate(net, s, keep, "grasp");
  return rank_with_current_mask(net, s, keep);
}

Mask prune_synflow(const MaskedMlp& net, double keep, std::size_t iterations) {
  check_keep(keep);
  if (iterations == 0) throw std::invalid_argument("synflow needs at least one iteration");
  MaskedMlp work = net;
  for (std::size_t r = 1; r <= iterations; ++r) {
    const double keep_r = std::pow(keep, static_cast<double>(r) / static_cast<double>(iterations));
    const Vector s = synflow_scores(work);
    work.set_mask(rank_with_current_mask(work, s, keep_r));
  }
  return work.mask();
}

Mask prune_magnitude(const MaskedMlp& net, double keep, MagnitudeWhen when) {
  return rank_with_current_mask(net, magnitude_scores(net, when == MagnitudeWhen::kAtInit), keep);
}

void ImpConfig::validate() const {
  if (!(drop_rate > 0.0 && drop_rate < 1.0)) throw std::invalid_argument("IMP drop_rate must be in (0, 1)");
  if (target_keep < 0.0 || target_keep > 1.0) throw std::invalid_argument("IMP target_keep must be in [0, 1]");
  train.validate();
}

std::size_t ImpConfig::rounds_for(double keep, double drop_rate) {
  check_keep(keep);
  if (keep >= 1.0) return 0;
  const double r = std::log(keep) / std::log(1.0 - drop_rate);
  return static_cast<std::size_t>(std::ceil(r - 1e-9));
}

ImpResult run_imp(MaskedMlp& net, const Matrix& X, const Vector& y, const ImpConfig& cfg,
                  const ImpHooks& hooks) {
  cfg.validate();
  ImpResult result;
  result.mask = net.mask();
  result.keep = static_cast<double>(net.mask().count()) / static_cast<double>(net.num_weights());
  for (std::size_t r = 1; r <= cfg.rounds; ++r) {
    if (hooks.on_round_start) hooks.on_round_start(r, net);
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.train.seed, {r});
    EpochCallback cb;
    if (hooks.on_epoch) cb = [&](std::size_t e, const MaskedMlp& m) { hooks.on_epoch(r, e, m); };
    const TrainTrace trace = train(net, X, y, tc, cb);

    double keep_r = std::pow(1.0 - cfg.drop_rate, static_cast<double>(r));
    if (cfg.target_keep > 0.0) keep_r = std::max(keep_r, cfg.target_keep);
    net.set_mask(prune_magnitude(net, keep_r, MagnitudeWhen::kAfterTraining));
    net.rewind();

    ImpRound round;
    round.round = r;
    round.keep = keep_r;
    round.kept = net.mask().count();
    round.train_loss = trace.final_loss();
    round.layer_collapse = net.mask().has_collapsed_layer();
    round.mask = net.mask();
    result.rounds.push_back(std::move(round));
    result.mask = net.mask();
    result.keep = keep_r;
    if (cfg.target_keep > 0.0 && keep_r <= cfg.target_keep) break;
  }
  if (hooks.on_finish) hooks.on_finish(net);
  return result;
}

}  // namespace prunemi
