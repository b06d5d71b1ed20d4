// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "prunemi/mlp.hpp"
#include "prunemi/rng.hpp"

inline prunemi::Matrix gaussian_matrix_for_test(Eigen::Index rows, Eigen::Index cols,
                                                std::uint64_t seed) {
  prunemi::Rng rng(prunemi::derive_seed(seed, {0x7e57}));
  std::normal_distribution<double> g(0.0, 1.0);
  prunemi::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}
