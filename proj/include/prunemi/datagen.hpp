// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset generators. Every generator is a pure function of its arguments.
//
// Gaussian covariates are drawn from N(0, I_d / d) so that E|x|^2 = 1; this is
// the normalization under which standard Gaussians satisfy c-isoperimetry with
// a dimension-free constant.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

#include "prunemi/idx.hpp"
#include "prunemi/mlp.hpp"

namespace prunemi {

/// Draws `count` fresh i.i.d. covariate rows from the data distribution.
using CovariateSampler = std::function<Matrix(std::size_t count, std::uint64_t seed)>;

struct Dataset {
  Matrix X;                    // n x d
  Vector y;                    // labels
  Vector z;                    // frozen label noise; zero where labels are clean
  std::vector<int> component;  // mixture component of each row (1-based)
  std::uint64_t seed = 0;
  CovariateSampler fresh_sampler;

  std::size_t size() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

/// Rows i.i.d. N(0, I_d/d).
Matrix gaussian_covariates(std::size_t n, std::size_t d, std::uint64_t seed);

/// n Gaussian points with uniform +-1 labels. The labels are pure noise, so
/// z = y.
Dataset gaussian_random_labels(std::size_t n, std::size_t d, std::uint64_t seed);

/// Six distinct corners of {+-1}^3 with i.i.d. uniform +-1 outputs (z = y).
Dataset hypercube_toy(std::uint64_t seed);

struct TeacherSpec {
  std::vector<std::size_t> hidden{50, 50};  // three weight matrices
};

/// y = teacher(x) + z with z ~ N(0, noise_var) stored. The teacher is a
/// MaskedMlp seeded from `seed`, so reusing the seed reproduces it exactly.
std::pair<Dataset, MaskedMlp> student_teacher(std::size_t n, std::size_t d,
                                              const TeacherSpec& teacher, double noise_var,
                                              std::uint64_t seed);

/// X <- X + N(0, noise_var) per entry. Labels and z are untouched.
Dataset noisify_inputs(const Dataset& data, double noise_var, std::uint64_t seed);

/// Converts IDX images (n x rows x cols, u8) and labels into a dataset with
/// pixels scaled to [0, 1]. Labels in `positive_classes` become +1, the rest
/// -1. z is zero (labels are taken as clean).
Dataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels,
                         const std::vector<int>& positive_classes);

/// One row per example: x_1..x_d, y, z, component. Header line included.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace prunemi
