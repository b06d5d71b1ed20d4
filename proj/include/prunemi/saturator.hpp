// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// A masked one-hidden-layer network whose only learned object is the mask:
// f(x) = (a * m)^T ReLU(W x + b). For each training point one hidden row is
// planted next to it, the mask keeps exactly those rows, and the output
// coefficients are solved so that f interpolates the labels. The function
// has n nonzero output weights but a mask carrying Theta(n d) bits.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prunemi/mlp.hpp"

namespace prunemi {

struct SaturatingInstance {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t p = 0;
  Matrix X;                       // n x d covariates, rows ~ N(0, I/d)
  Vector y;                       // +-1 labels
  Matrix W;                       // p x d hidden weights
  Vector b;                       // p biases
  std::vector<std::size_t> mem;   // mem[i] = hidden row memorizing point i
  std::vector<std::uint8_t> mask; // 1 exactly at the memorizer rows
  Vector a;                       // p output coefficients (zero off the mask)
  std::uint64_t seed = 0;         // seed of the accepted draw
  std::size_t attempts = 1;       // draws needed to obtain a solvable system

  double eval(const Eigen::Ref<const Vector>& x) const;
  Vector eval_rows(const Matrix& points) const;
};

struct SaturatorOptions {
  double bias = -0.8;
  double perturbation_ratio = 0.01;  // ||w_mem(i) - x_i|| <= ratio * ||x_i||
  std::size_t max_attempts = 16;
  /// Redraw when a fatal verification check fails, not only when the
  /// interpolation system is singular.
  bool resample_on_failed_checks = true;
};

/// Builds a planted instance. Redraws with a derived seed when the
/// interpolation system is singular or, if enabled, when verification fails.
/// After max_attempts draws the last solvable draw is returned as is, so its
/// report names the failing checks; throws if no draw was solvable.
SaturatingInstance build_saturating(std::size_t n, std::size_t d, std::size_t p,
                                    std::uint64_t seed, const SaturatorOptions& opts = {});

struct SaturationCheck {
  std::string name;
  bool passed = true;
  bool fatal = true;   // non-fatal checks are reported but do not fail the instance
  double observed = 0.0;  // worst value seen
  std::string bound;      // the inequality being checked
};

struct SaturationReport {
  std::vector<SaturationCheck> checks;
  bool passed = true;             // every fatal check passed
  bool structural_passed = true;  // perturbation, exclusivity, interpolation, mask size
  double max_interpolation_error = 0.0;

  const SaturationCheck& check(const std::string& name) const;
};

/// Checks each covariate and alignment inequality of the construction, the
/// exclusive activation pattern, exact interpolation, and the mask size.
/// The d^{-1/3} cross inner-product check is non-fatal.
SaturationReport verify_saturating(const SaturatingInstance& inst);

/// Largest observed difference quotient |f(x) - f(x')| / ||x - x'|| over
/// random pairs in the ball of radius 1.1, local pairs around each memorized
/// point, and pairs straddling each unit's activation boundary.
double estimate_lipschitz(const SaturatingInstance& inst, std::size_t samples, double step,
                          std::uint64_t seed);

struct SaturationAccount {
  std::size_t mask_l1 = 0;
  double nd = 0.0;
  double entropy_cap_bits = 0.0;  // log2 C(p, n)
  double peff_continuous = 0.0;   // at I = entropy cap
};

SaturationAccount saturating_mi_account(const SaturatingInstance& inst, double W_diam, double J,
                                        double eps);

}  // namespace prunemi
