// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "prunemi/entropy.hpp"
#include "prunemi/rng.hpp"
#include "prunemi/theory.hpp"

namespace prunemi {
namespace {

void check_common(std::size_t trials, double delta) {
  if (trials == 0) throw std::invalid_argument("verifier needs at least one trial");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
}

/// Index of the largest value; ties go to the lower index.
std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Samples from softmax(beta * v) and returns (index, entropy of the
/// distribution in bits).
std::pair<std::size_t, double> softmax_draw(const std::vector<double>& v, double beta, Rng& rng) {
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> w(v.size());
  double total = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    w[t] = std::exp(beta * (v[t] - top));
    total += w[t];
  }
  for (double& x : w) x /= total;
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  const std::size_t chosen = pick(rng);
  return {chosen, entropy_bits(w)};
}

/// Plug-in I(W; data) = H(W) - E[H(W | data)], floored at zero.
double plugin_mi(const std::vector<std::uint64_t>& counts, double mean_conditional_bits) {
  return std::max(0.0, plugin_entropy(counts) - mean_conditional_bits);
}

// Gaps are O(1/sqrt(m)); a large inverse temperature keeps the softmax
// selector data-dependent at that scale.
constexpr double kGapSoftmaxBeta = 50.0;

}  // namespace

Selector parse_selector(std::string_view name) {
  if (name == "fixed") return Selector::kFixed;
  if (name == "independent") return Selector::kIndependent;
  if (name == "argmax" || name == "adversarial") return Selector::kArgmax;
  if (name == "softmax") return Selector::kSoftmax;
  throw std::invalid_argument("unknown selector '" + std::string(name) + "'");
}

std::string_view to_string(Selector s) noexcept {
  switch (s) {
    case Selector::kFixed: return "fixed";
    case Selector::kIndependent: return "independent";
    case Selector::kArgmax: return "argmax";
    case Selector::kSoftmax: return "softmax";
  }
  return "unknown";
}

Lemma1Report verify_lemma1(const Lemma1Config& cfg) {
  check_common(cfg.trials, cfg.delta);
  if (cfg.family_size == 0) throw std::invalid_argument("family_size must be >= 1");
  const std::size_t T = cfg.family_size;

  std::vector<std::uint64_t> counts(T, 0);
  std::vector<double> selected(cfg.trials);
  double conditional_bits = 0.0;
  std::vector<double> x(T);
  std::vector<double> ax(T);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(derive_seed(cfg.seed, {trial}));
    for (std::size_t t = 0; t < T; ++t) {
      x[t] = gauss(rng);
      ax[t] = std::abs(x[t]);
    }
    std::size_t w = 0;
    switch (cfg.selector) {
      case Selector::kFixed:
        break;
      case Selector::kIndependent:
        w = std::uniform_int_distribution<std::size_t>(0, T - 1)(rng);
        conditional_bits += std::log2(static_cast<double>(T));
        break;
      case Selector::kArgmax:
        w = argmax(ax);
        break;
      case Selector::kSoftmax: {
        const auto [chosen, h] = softmax_draw(ax, cfg.softmax_beta, rng);
        w = chosen;
        conditional_bits += h;
        break;
      }
    }
    ++counts[w];
    selected[trial] = ax[w];
  }

  Lemma1Report r;
  r.trials = cfg.trials;
  r.delta = cfg.delta;
  r.C = 2.0;
  r.I_bits = plugin_mi(counts, conditional_bits / static_cast<double>(cfg.trials));
  r.rhs = lemma1_rhs(r.C, bits_to_nats(r.I_bits), cfg.delta);
  double sum = 0.0;
  for (double v : selected) {
    sum += v;
    r.max_abs_selected = std::max(r.max_abs_selected, v);
    if (v >= r.rhs) ++r.violations;
  }
  r.mean_abs_selected = sum / static_cast<double>(cfg.trials);
  r.violation_frequency = static_cast<double>(r.violations) / static_cast<double>(cfg.trials);
  return r;
}

GenBoundsReport verify_genbounds(const GenBoundsConfig& cfg) {
  check_common(cfg.trials, cfg.delta);
  if (cfg.num_classes == 0 || cfg.class_size == 0 || cfg.domain_size == 0 || cfg.m == 0) {
    throw std::invalid_argument("verify_genbounds: sizes must be >= 1");
  }
  if (cfg.label_noise < 0.0 || cfg.label_noise > 0.5) {
    throw std::invalid_argument("verify_genbounds: label_noise must be in [0, 0.5]");
  }
  const std::size_t K = cfg.domain_size;
  const std::size_t H = cfg.num_classes * cfg.class_size;
  const double eta = cfg.label_noise;

  // Fixed problem instance: target labels and hypotheses, drawn once.
  Rng setup(derive_seed(cfg.seed, {0xC1A55ULL}));
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> target(K);
  for (auto& t : target) t = coin(setup) ? 1 : 0;
  std::vector<std::uint8_t> hyp(H * K);
  for (auto& h : hyp) h = coin(setup) ? 1 : 0;

  // Population 0-1 risk of every hypothesis.
  std::vector<double> risk(H, 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    double r = 0.0;
    for (std::size_t x = 0; x < K; ++x) {
      r += (hyp[h * K + x] != target[x]) ? (1.0 - eta) : eta;
    }
    risk[h] = r / static_cast<double>(K);
  }

  const double m = static_cast<double>(cfg.m);
  const double N = static_cast<double>(cfg.class_size);
  GenBoundsReport rep;
  rep.trials = cfg.trials;
  rep.delta = cfg.delta;
  rep.d_vc = std::floor(std::log2(N));
  if (!(m > rep.d_vc + 1.0)) throw std::invalid_argument("verify_genbounds: need m > d_vc + 1");

  std::vector<std::uint64_t> counts(cfg.num_classes, 0);
  std::vector<double> selected(cfg.trials);
  std::vector<double> gap(cfg.num_classes);
  std::vector<std::uint32_t> cnt(2 * K);
  double conditional_bits = 0.0;
  std::uniform_int_distribution<std::size_t> draw_x(0, K - 1);
  std::bernoulli_distribution flip(eta);

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(derive_seed(cfg.seed, {trial}));
    std::fill(cnt.begin(), cnt.end(), 0);
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const std::size_t x = draw_x(rng);
      const std::uint8_t y = flip(rng) ? (1 - target[x]) : target[x];
      ++cnt[2 * x + y];
    }
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
      double worst = 0.0;
      for (std::size_t j = 0; j < cfg.class_size; ++j) {
        const std::size_t h = c * cfg.class_size + j;
        std::uint32_t errors = 0;
        for (std::size_t x = 0; x < K; ++x) errors += cnt[2 * x + (1 - hyp[h * K + x])];
        worst = std::max(worst, std::abs(risk[h] - errors / m));
      }
      gap[c] = worst;
    }
    std::size_t w = 0;
    switch (cfg.selector) {
      case Selector::kFixed:
        break;
      case Selector::kIndependent:
        w = std::uniform_int_distribution<std::size_t>(0, cfg.num_classes - 1)(rng);
        conditional_bits += std::log2(static_cast<double>(cfg.num_classes));
        break;
      case Selector::kArgmax:
        w = argmax(gap);
        break;
      case Selector::kSoftmax: {
        const auto [chosen, h] = softmax_draw(gap, kGapSoftmaxBeta, rng);
        w = chosen;
        conditional_bits += h;
        break;
      }
    }
    ++counts[w];
    selected[trial] = gap[w];
  }

  rep.I_bits = plugin_mi(counts, conditional_bits / static_cast<double>(cfg.trials));
  rep.vc_bound = vc_mi_bound(rep.d_vc, m, rep.I_bits, cfg.delta);
  rep.rad_hat = massart(N, 1.0, m);
  rep.rad_bound = rademacher_mi_bound(rep.rad_hat, m, 1.0, rep.I_bits, cfg.delta);
  double sum = 0.0;
  for (double g : selected) {
    sum += g;
    rep.max_selected_gap = std::max(rep.max_selected_gap, g);
    if (g > rep.vc_bound) ++rep.vc_violations;
    if (g > rep.rad_bound) ++rep.rad_violations;
  }
  const double trials = static_cast<double>(cfg.trials);
  rep.mean_selected_gap = sum / trials;
  rep.vc_violation_frequency = static_cast<double>(rep.vc_violations) / trials;
  rep.rad_violation_frequency = static_cast<double>(rep.rad_violations) / trials;
  return rep;
}

}  // namespace prunemi
