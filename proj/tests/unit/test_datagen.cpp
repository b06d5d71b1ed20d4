// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "prunemi/datagen.hpp"
#include "prunemi/idx.hpp"

using namespace prunemi;

namespace {

std::vector<std::uint8_t> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
          static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

std::vector<std::uint8_t> hand_images() {
  std::vector<std::uint8_t> b = be32(0x00000803);
  for (std::uint32_t d : {2u, 2u, 2u}) {
    auto e = be32(d);
    b.insert(b.end(), e.begin(), e.end());
  }
  for (std::uint8_t v = 0; v < 8; ++v) b.push_back(static_cast<std::uint8_t>(v * 30));
  return b;
}

std::vector<std::uint8_t> hand_labels(std::vector<std::uint8_t> labels) {
  std::vector<std::uint8_t> b = be32(0x00000801);
  auto e = be32(static_cast<std::uint32_t>(labels.size()));
  b.insert(b.end(), e.begin(), e.end());
  b.insert(b.end(), labels.begin(), labels.end());
  return b;
}

}  // namespace

TEST_CASE("gaussian_random_labels: shape, labels and scale") {
  const Dataset ds = gaussian_random_labels(30, 30, 1);
  CHECK(ds.X.rows() == 30);
  CHECK(ds.X.cols() == 30);
  for (Eigen::Index i = 0; i < 30; ++i) CHECK(std::abs(ds.y[i]) == 1.0);
  CHECK(ds.z == ds.y);

  // E||x||^2 = 1 with variance 2/d per row.
  const std::size_t n = 4000, d = 50;
  const Dataset big = gaussian_random_labels(n, d, 2);
  const double mean_sq = big.X.rowwise().squaredNorm().mean();
  const double sigma = std::sqrt(2.0 / d / n);
  CHECK(std::abs(mean_sq - 1.0) < 3 * sigma);

  CHECK(gaussian_random_labels(30, 30, 1).X == ds.X);
  CHECK(gaussian_random_labels(30, 30, 7).X != ds.X);
  CHECK_THROWS(gaussian_random_labels(0, 3, 1));
}

TEST_CASE("hypercube_toy: six distinct corners with +-1 labels") {
  const Dataset ds = hypercube_toy(3);
  CHECK(ds.X.rows() == 6);
  CHECK(ds.X.cols() == 3);
  CHECK((ds.X.array().abs() == 1.0).all());
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < 6; ++i) rows.insert({ds.X(i, 0), ds.X(i, 1), ds.X(i, 2)});
  CHECK(rows.size() == 6);
}

TEST_CASE("hypercube_toy: labels are uniform (chi-square)") {
  const int seeds = 1000;
  int plus = 0;
  for (int s = 0; s < seeds; ++s) {
    const Dataset ds = hypercube_toy(static_cast<std::uint64_t>(s));
    for (Eigen::Index i = 0; i < 6; ++i) plus += ds.y[i] > 0;
  }
  const double total = seeds * 6.0, e = total / 2;
  const double chi2 = 2 * (plus - e) * (plus - e) / e;
  CHECK(chi2 < 6.635);  // p > 0.01 at one degree of freedom
}

TEST_CASE("student_teacher: noise variance, zero noise, reproducibility") {
  auto [ds, teacher] = student_teacher(1000, 50, TeacherSpec{}, 1.0, 5);
  const double mean = ds.z.mean();
  const double var = (ds.z.array() - mean).square().sum() / (ds.z.size() - 1.0);
  CHECK(var >= 0.9);
  CHECK(var <= 1.1);
  CHECK((ds.y - teacher.predict(ds.X) - ds.z).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ds.fresh_sampler(7, 1).rows() == 7);

  auto [clean, t2] = student_teacher(100, 10, TeacherSpec{}, 0.0, 5);
  CHECK(clean.z.isZero());
  CHECK(clean.y == t2.predict(clean.X));

  auto [again, t3] = student_teacher(1000, 50, TeacherSpec{}, 1.0, 5);
  CHECK(again.y == ds.y);
  CHECK_THROWS(student_teacher(10, 5, TeacherSpec{}, -1.0, 5));
}

TEST_CASE("noisify_inputs: zero noise, variance and label preservation") {
  const Dataset base = gaussian_random_labels(200, 100, 1);
  CHECK(noisify_inputs(base, 0.0, 3).X == base.X);
  const Dataset noisy = noisify_inputs(base, 3.0, 3);
  const Matrix diff = noisy.X - base.X;
  const double var = diff.array().square().mean() - std::pow(diff.mean(), 2);
  CHECK(var == doctest::Approx(3.0).epsilon(0.05));
  CHECK(noisy.y == base.y);
  CHECK(noisy.z == base.z);
  const Dataset other = noisify_inputs(base, 3.0, 4);
  CHECK(other.X != noisy.X);
  CHECK(other.y == noisy.y);
}

TEST_CASE("idx: hand-built image and label files round trip") {
  const auto img = parse_idx(hand_images());
  CHECK(img.dims == std::vector<std::uint32_t>{2, 2, 2});
  for (std::uint8_t v = 0; v < 8; ++v) CHECK(img.data[v] == v * 30);
  CHECK(encode_idx(img) == hand_images());

  const auto lab = parse_idx(hand_labels({0, 9}));
  CHECK(lab.dims == std::vector<std::uint32_t>{2});
  CHECK(lab.data == std::vector<std::uint8_t>{0, 9});
}

TEST_CASE("idx: bad magic and truncation report the byte offset") {
  auto bad = hand_images();
  bad[0] = 0xDE;
  bad[1] = 0xAD;
  bad[2] = 0xBE;
  bad[3] = 0xEF;
  CHECK_THROWS_AS(parse_idx(bad), IdxParseError);
  try {
    parse_idx(bad);
  } catch (const IdxParseError& e) {
    CHECK(e.offset() == 0);
  }
  auto trunc = hand_images();
  trunc.pop_back();
  try {
    parse_idx(trunc);
    FAIL("expected IdxParseError");
  } catch (const IdxParseError& e) {
    CHECK(e.offset() > 0);
  }
}

TEST_CASE("idx: file input and binary dataset construction") {
  const auto dir = std::filesystem::temp_directory_path() / "prunemi_idx_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "img.idx", std::ios::binary);
    const auto b = hand_images();
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    std::ofstream lab(dir / "lab.idx", std::ios::binary);
    const auto l = hand_labels({3, 7});
    lab.write(reinterpret_cast<const char*>(l.data()), static_cast<std::streamsize>(l.size()));
  }
  const Dataset ds = dataset_from_idx(parse_idx(dir / "img.idx"), parse_idx(dir / "lab.idx"),
                                      {5, 6, 7, 8, 9});
  CHECK(ds.X.rows() == 2);
  CHECK(ds.X.cols() == 4);
  CHECK(ds.X(1, 3) == doctest::Approx(210.0 / 255.0));
  CHECK(ds.y[0] == -1.0);
  CHECK(ds.y[1] == 1.0);
  CHECK_THROWS(parse_idx(dir / "missing.idx"));
  std::filesystem::remove_all(dir);
}
