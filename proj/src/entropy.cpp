// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace prunemi {

double plugin_entropy(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("plugin_entropy: counts must have a positive total");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / n;
    h -= q * std::log2(q);
  }
  return h == 0.0 ? 0.0 : h;  // avoid -0
}

double entropy_bits(std::span<const double> probabilities) {
  double h = 0.0;
  for (double q : probabilities) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h == 0.0 ? 0.0 : h;
}

}  // namespace prunemi
