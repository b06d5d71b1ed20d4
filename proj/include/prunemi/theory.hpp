// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form quantities of the masked law of robustness and the
// information-augmented generalization bounds.
//
// Units: mutual informations and entropies are passed in bits everywhere.
// Lemma-style tail bounds are stated in nats; the functions that need nats
// convert internally (lemma1_rhs is the one exception and takes nats, since
// it is the raw inequality).

#pragma once

#include <cstddef>
#include <string>

namespace prunemi {

/// Squared absolute constant of the mutual-information tail lemma.
inline constexpr double kA1Squared = 72.0;
double a1();

double bits_to_nats(double bits);
double nats_to_bits(double nats);

/// Every symbol the bounds refer to. `I_bits` is I(m; D) in bits.
struct BoundInputs {
  double n = 1;        // sample count
  double d = 1;        // input dimension
  double eps = 0.1;    // accuracy margin, (0, 1)
  double delta = 0.1;  // failure probability, (0, 1)
  double sigma2 = 1;   // label-noise level, > 0
  double c = 1;        // isoperimetry constant
  double k = 1;        // mixture components
  double L = 1;        // Lipschitz constant of the class members
  double W_diam = 1;   // weight-space diameter
  double J = 1;        // parameter-to-function Lipschitz constant
  double I_bits = 0;   // mask/data mutual information
  double gamma = 0;    // sparsity, fraction removed
  double p = 1;        // raw parameter count

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// 144 c L^2 / (n d).
double c0(double c, double L, double n, double d);
double c0(const BoundInputs& in);

/// I + E[log2 N_m] (finite setting).
double peff_finite(double I_bits, double expected_log2_Nm);

/// I + E||m||_1 log2(1 + 60 W J / eps) (continuous setting).
double peff_continuous(double I_bits, double expected_mask_l1, double W_diam, double J,
                       double eps);

struct LipschitzBound {
  double value = 0.0;
  bool precondition_met = false;  // 8^3 k log(8k/delta) <= n eps^2
  double precondition_lhs = 0.0;
  double precondition_rhs = 0.0;
};

/// eps / (96 a1 sqrt(2c)) * sqrt(n d delta / (peff + (delta/2) log(4/delta))).
/// The value is computed even when the precondition fails.
LipschitzBound lipschitz_lower_bound(const BoundInputs& in, double peff);

/// Failure probability of the finite-class theorem:
/// (2k+2) e^{-n eps^2 / (8^3 k)} + max(2^7 a1^2 C0 peff / eps^2, 2 e^{-eps^2/(2^7 a1^2 C0)}).
double finite_failure_probability(const BoundInputs& in, double peff);

/// log2 of the binomial coefficient via log-gamma (k may be fractional).
double log2_binomial(double n, double k);

struct EntropyBound {
  double exact_bits = 0.0;       // log2 C(p, gamma p)
  double asymptotic_bits = 0.0;  // p H2(gamma)
};
EntropyBound entropy_upper_bound(double p, double gamma);

/// log2(1 / (1 - gamma)); the ratio of effective parameter counts between a
/// data-dependent and a data-free mask at sparsity gamma.
double peff_ratio(double gamma);

/// a1 sqrt((C / delta) I + C log(2 / delta)), with I in nats.
double lemma1_rhs(double C, double I_nats, double delta);

/// (4 + sqrt(d log(2em/d)) + sqrt((4 a1^2 / delta)(I + delta log(2/delta)))) / sqrt(2m).
/// Requires m > d_vc + 1; I is converted from bits to nats.
double vc_mi_bound(double d_vc, double m, double I_bits, double delta);

/// 2 rad_hat + (6 / sqrt(m)) sqrt((a1^2 b / delta)(I + (delta/2) log(4/delta))).
/// I is converted from bits to nats.
double rademacher_mi_bound(double rad_hat, double m, double b, double I_bits, double delta);

/// Massart's lemma: b sqrt(2 log N) / sqrt(m).
double massart(double N, double b, double m);

/// Parses a flat JSON object of BoundInputs fields (missing fields keep their
/// defaults; unknown fields are rejected) and validates it.
BoundInputs bound_inputs_from_json(const std::string& text);

/// Evaluates every calculator and returns a deterministic JSON report.
/// Besides the BoundInputs fields the document may carry: expected_mask_l1
/// (default (1 - gamma) p), expected_log2_Nm, C (default C0), m, d_vc,
/// rad_hat, b, N.
std::string bounds_report_json(const std::string& input_json);

}  // namespace prunemi
