// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <stdexcept>

#include "prunemi/rng.hpp"

namespace prunemi {
namespace {

enum SeedStream : std::uint64_t { kCovariates = 1, kLabels, kNoise, kTeacher };

Matrix hypercube_corners() {
  Matrix c(8, 3);
  for (int k = 0; k < 8; ++k) {
    for (int b = 0; b < 3; ++b) c(k, b) = ((k >> (2 - b)) & 1) ? 1.0 : -1.0;
  }
  return c;
}

}  // namespace

Matrix gaussian_covariates(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = gauss(rng);
  }
  return X;
}

Dataset gaussian_random_labels(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("gaussian_random_labels: n and d must be >= 1");
  Dataset ds;
  ds.seed = seed;
  ds.X = gaussian_covariates(n, d, derive_seed(seed, {kCovariates}));
  Rng rng(derive_seed(seed, {kLabels}));
  std::bernoulli_distribution coin(0.5);
  ds.y.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < ds.y.size(); ++i) ds.y[i] = coin(rng) ? 1.0 : -1.0;
  ds.z = ds.y;
  ds.component.assign(n, 1);
  ds.fresh_sampler = [d](std::size_t count, std::uint64_t s) { return gaussian_covariates(count, d, s); };
  return ds;
}

Dataset hypercube_toy(std::uint64_t seed) {
  const Matrix corners = hypercube_corners();
  std::array<int, 8> order{};
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {kCovariates}));
  // Partial Fisher-Yates: the first six entries are a uniform draw without
  // replacement.
  for (int k = 0; k < 6; ++k) {
    std::uniform_int_distribution<int> pick(k, 7);
    std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick(rng))]);
  }
  Dataset ds;
  ds.seed = seed;
  ds.X.resize(6, 3);
  for (int k = 0; k < 6; ++k) ds.X.row(k) = corners.row(order[static_cast<std::size_t>(k)]);
  Rng label_rng(derive_seed(seed, {kLabels}));
  std::bernoulli_distribution coin(0.5);
  ds.y.resize(6);
  for (int k = 0; k < 6; ++k) ds.y[k] = coin(label_rng) ? 1.0 : -1.0;
  ds.z = ds.y;
  ds.component.assign(6, 1);
  ds.fresh_sampler = [corners](std::size_t count, std::uint64_t s) {
    Rng r(s);
    std::uniform_int_distribution<int> pick(0, 7);
    Matrix X(static_cast<Eigen::Index>(count), 3);
    for (Eigen::Index i = 0; i < X.rows(); ++i) X.row(i) = corners.row(pick(r));
    return X;
  };
  return ds;
}

std::pair<Dataset, MaskedMlp> student_teacher(std::size_t n, std::size_t d,
                                              const TeacherSpec& teacher_spec, double noise_var,
                                              std::uint64_t seed) {
  if (!(noise_var >= 0.0)) throw std::invalid_argument("student_teacher: noise_var must be >= 0");
  if (n == 0 || d == 0) throw std::invalid_argument("student_teacher: n and d must be >= 1");
  std::vector<std::size_t> dims{d};
  dims.insert(dims.end(), teacher_spec.hidden.begin(), teacher_spec.hidden.end());
  dims.push_back(1);
  MaskedMlp teacher(dims, derive_seed(seed, {kTeacher}));

  Dataset ds;
  ds.seed = seed;
  ds.X = gaussian_covariates(n, d, derive_seed(seed, {kCovariates}));
  ds.z = Vector::Zero(static_cast<Eigen::Index>(n));
  if (noise_var > 0.0) {
    Rng rng(derive_seed(seed, {kNoise}));
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var));
    for (Eigen::Index i = 0; i < ds.z.size(); ++i) ds.z[i] = gauss(rng);
  }
  ds.y = teacher.predict(ds.X) + ds.z;
  ds.component.assign(n, 1);
  ds.fresh_sampler = [d](std::size_t count, std::uint64_t s) { return gaussian_covariates(count, d, s); };
  return {std::move(ds), std::move(teacher)};
}

Dataset noisify_inputs(const Dataset& data, double noise_var, std::uint64_t seed) {
  if (!(noise_var >= 0.0)) throw std::invalid_argument("noisify_inputs: noise_var must be >= 0");
  Dataset out = data;
  if (noise_var == 0.0) return out;
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var));
  for (Eigen::Index i = 0; i < out.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.X.cols(); ++j) out.X(i, j) += gauss(rng);
  }
  return out;
}

Dataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels,
                         const std::vector<int>& positive_classes) {
  if (images.dims.size() != 3 || labels.dims.size() != 1) {
    throw std::invalid_argument("dataset_from_idx: expected rank-3 images and rank-1 labels");
  }
  if (images.dims[0] != labels.dims[0]) {
    throw std::invalid_argument("dataset_from_idx: image and label counts differ");
  }
  const std::size_t n = images.dims[0];
  const std::size_t d = std::size_t{images.dims[1]} * images.dims[2];
  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = images.data[i * d + j] / 255.0;
    }
  }
  ds.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = labels.data[i];
    const bool pos = std::find(positive_classes.begin(), positive_classes.end(), c) != positive_classes.end();
    ds.y[static_cast<Eigen::Index>(i)] = pos ? 1.0 : -1.0;
  }
  ds.z = Vector::Zero(static_cast<Eigen::Index>(n));
  ds.component.assign(n, 1);
  return ds;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << j + 1 << ',';
  out << "y,z,component\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << data.X(i, j) << ',';
    out << data.y[i] << ',' << data.z[i] << ',' << data.component[static_cast<std::size_t>(i)] << '\n';
  }
}

}  // namespace prunemi
