// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo checks of the mutual-information tail lemma and of the
// information-augmented VC / Rademacher bounds.
//
// Both verifiers run all trials first, estimate I(W; data) by plug-in from
// the observed selections, and then count how often the selected variable
// exceeds the bound evaluated at that estimate.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace prunemi {

enum class Selector {
  kFixed,        // always index 0
  kIndependent,  // uniform, independent of the data
  kArgmax,       // the index maximizing |X_t| (or the generalization gap)
  kSoftmax,      // random, with probability proportional to exp(beta |X_t|)
};

Selector parse_selector(std::string_view name);
std::string_view to_string(Selector s) noexcept;

struct Lemma1Config {
  std::size_t family_size = 1024;  // T
  Selector selector = Selector::kArgmax;
  std::size_t trials = 10000;
  double delta = 0.05;
  double softmax_beta = 2.0;
  std::uint64_t seed = 0;
};

struct Lemma1Report {
  std::size_t trials = 0;
  double delta = 0.0;
  double C = 0.0;        // subgaussian constant of the standard normal family
  double I_bits = 0.0;   // plug-in estimate of I(W; {X_t})
  double rhs = 0.0;      // lemma bound at the estimated I
  std::size_t violations = 0;
  double violation_frequency = 0.0;
  double mean_abs_selected = 0.0;
  double max_abs_selected = 0.0;
};

/// X_t i.i.d. N(0, 1), which is C-subgaussian with C = 2 in the convention
/// P(|X| >= t) <= 2 exp(-t^2 / C).
Lemma1Report verify_lemma1(const Lemma1Config& cfg);

struct GenBoundsConfig {
  std::size_t num_classes = 64;   // |T|
  std::size_t class_size = 16;    // N hypotheses per class
  std::size_t domain_size = 32;   // finite input space, uniform marginal
  std::size_t m = 200;            // sample size
  double label_noise = 0.2;       // probability of flipping the target label
  Selector selector = Selector::kArgmax;
  std::size_t trials = 10000;
  double delta = 0.05;
  std::uint64_t seed = 0;
};

struct GenBoundsReport {
  std::size_t trials = 0;
  double delta = 0.0;
  double I_bits = 0.0;
  double d_vc = 0.0;        // floor(log2 N), the VC dimension cap of an N-element class
  double vc_bound = 0.0;
  double rad_hat = 0.0;     // Massart bound on the empirical Rademacher complexity
  double rad_bound = 0.0;
  std::size_t vc_violations = 0;
  std::size_t rad_violations = 0;
  double vc_violation_frequency = 0.0;
  double rad_violation_frequency = 0.0;
  double mean_selected_gap = 0.0;
  double max_selected_gap = 0.0;
};

/// Random binary hypotheses over a finite domain with 0-1 loss; the sup
/// generalization gap of every class is computed exactly from the known
/// population distribution.
GenBoundsReport verify_genbounds(const GenBoundsConfig& cfg);

}  // namespace prunemi
