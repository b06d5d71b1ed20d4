// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "prunemi/theory.hpp"
#include "prunemi/verifiers.hpp"

using namespace prunemi;

TEST_CASE("selector names round trip") {
  for (Selector s : {Selector::kFixed, Selector::kIndependent, Selector::kArgmax, Selector::kSoftmax}) {
    CHECK(parse_selector(to_string(s)) == s);
  }
  CHECK(parse_selector("adversarial") == Selector::kArgmax);
  CHECK_THROWS(parse_selector("greedy"));
}

TEST_CASE("lemma1: independent and argmax selectors respect delta") {
  for (Selector s : {Selector::kIndependent, Selector::kArgmax, Selector::kSoftmax}) {
    Lemma1Config cfg;
    cfg.family_size = 64;
    cfg.selector = s;
    cfg.trials = 2000;
    cfg.delta = 0.1;
    cfg.seed = 3;
    const Lemma1Report r = verify_lemma1(cfg);
    CHECK(r.violation_frequency <= cfg.delta);
    CHECK(r.rhs == doctest::Approx(lemma1_rhs(2.0, bits_to_nats(r.I_bits), 0.1)));
    CHECK(r.max_abs_selected >= r.mean_abs_selected);
  }
}

TEST_CASE("lemma1: information estimates match the selector") {
  Lemma1Config cfg;
  cfg.family_size = 16;
  cfg.trials = 4000;
  cfg.selector = Selector::kFixed;
  CHECK(verify_lemma1(cfg).I_bits == 0.0);
  cfg.selector = Selector::kIndependent;
  CHECK(verify_lemma1(cfg).I_bits < 0.05);  // only plug-in bias
  cfg.selector = Selector::kArgmax;
  CHECK(verify_lemma1(cfg).I_bits == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("lemma1: a family of one has zero information and a fixed rhs") {
  Lemma1Config cfg;
  cfg.family_size = 1;
  cfg.trials = 500;
  cfg.delta = 0.05;
  const Lemma1Report r = verify_lemma1(cfg);
  CHECK(r.I_bits == 0.0);
  CHECK(r.rhs == doctest::Approx(std::sqrt(72.0 * 2.0 * std::log(40.0))));
  CHECK(r.violations == 0);
}

TEST_CASE("lemma1: deterministic in the seed and validated") {
  Lemma1Config cfg;
  cfg.trials = 300;
  cfg.family_size = 32;
  const auto a = verify_lemma1(cfg);
  const auto b = verify_lemma1(cfg);
  CHECK(a.mean_abs_selected == b.mean_abs_selected);
  CHECK(a.I_bits == b.I_bits);
  cfg.trials = 0;
  CHECK_THROWS(verify_lemma1(cfg));
  cfg.trials = 10;
  cfg.delta = 1.0;
  CHECK_THROWS(verify_lemma1(cfg));
}

TEST_CASE("genbounds: bounds hold for every selector") {
  for (Selector s : {Selector::kFixed, Selector::kIndependent, Selector::kArgmax, Selector::kSoftmax}) {
    GenBoundsConfig cfg;
    cfg.selector = s;
    cfg.trials = 1000;
    cfg.seed = 11;
    const GenBoundsReport r = verify_genbounds(cfg);
    CHECK(r.vc_violation_frequency <= cfg.delta);
    CHECK(r.rad_violation_frequency <= cfg.delta);
    CHECK(r.d_vc == 4.0);
    CHECK(r.rad_hat == doctest::Approx(massart(16, 1, 200)));
    CHECK(r.vc_bound == doctest::Approx(vc_mi_bound(4, 200, r.I_bits, 0.05)));
  }
}

TEST_CASE("genbounds: the argmax selector reveals information and larger gaps") {
  GenBoundsConfig cfg;
  cfg.trials = 1000;
  cfg.selector = Selector::kFixed;
  const auto fixed = verify_genbounds(cfg);
  cfg.selector = Selector::kArgmax;
  const auto adv = verify_genbounds(cfg);
  CHECK(fixed.I_bits == 0.0);
  CHECK(adv.I_bits > 1.0);
  CHECK(adv.mean_selected_gap > fixed.mean_selected_gap);
}

TEST_CASE("genbounds: a single class carries no information") {
  GenBoundsConfig cfg;
  cfg.num_classes = 1;
  cfg.trials = 200;
  const auto r = verify_genbounds(cfg);
  CHECK(r.I_bits == 0.0);
  cfg.m = 2;
  CHECK_THROWS(verify_genbounds(cfg));
  cfg.m = 200;
  cfg.label_noise = 0.7;
  CHECK_THROWS(verify_genbounds(cfg));
}
