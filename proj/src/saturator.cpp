// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/saturator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

#include "prunemi/rng.hpp"
#include "prunemi/theory.hpp"

namespace prunemi {
namespace {

constexpr double kBallRadius = 1.1;

Vector random_unit(std::size_t d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector u(static_cast<Eigen::Index>(d));
  do {
    for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = g(rng);
  } while (u.norm() == 0.0);
  return u / u.norm();
}

/// Uniform point in the d-ball of the given radius.
Vector random_in_ball(std::size_t d, double radius, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double r = radius * std::pow(uni(rng), 1.0 / static_cast<double>(d));
  return r * random_unit(d, rng);
}

Vector clamp_to_ball(Vector x) {
  const double nrm = x.norm();
  if (nrm > kBallRadius) x *= kBallRadius / nrm;
  return x;
}

SaturationCheck make_check(std::string name, bool passed, double observed, std::string bound,
                           bool fatal = true) {
  SaturationCheck c;
  c.name = std::move(name);
  c.passed = passed;
  c.fatal = fatal;
  c.observed = observed;
  c.bound = std::move(bound);
  return c;
}

}  // namespace

double SaturatingInstance::eval(const Eigen::Ref<const Vector>& x) const {
  double f = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    if (!mask[k]) continue;
    const double pre = W.row(static_cast<Eigen::Index>(k)).dot(x) + b[static_cast<Eigen::Index>(k)];
    if (pre > 0.0) f += a[static_cast<Eigen::Index>(k)] * pre;
  }
  return f;
}

Vector SaturatingInstance::eval_rows(const Matrix& points) const {
  Vector out(points.rows());
  for (Eigen::Index r = 0; r < points.rows(); ++r) out[r] = eval(points.row(r).transpose());
  return out;
}

SaturatingInstance build_saturating(std::size_t n, std::size_t d, std::size_t p,
                                    std::uint64_t seed, const SaturatorOptions& opts) {
  if (d == 0) throw std::invalid_argument("build_saturating: d must be >= 1");
  if (p < n) throw std::invalid_argument("build_saturating: need p >= n");
  if (opts.max_attempts == 0) throw std::invalid_argument("build_saturating: max_attempts >= 1");
  const auto N = static_cast<Eigen::Index>(n);
  const auto D = static_cast<Eigen::Index>(d);
  const auto P = static_cast<Eigen::Index>(p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  std::optional<SaturatingInstance> fallback;
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    SaturatingInstance inst;
    inst.n = n;
    inst.d = d;
    inst.p = p;
    inst.seed = attempt == 0 ? seed : derive_seed(seed, {attempt});
    inst.attempts = attempt + 1;
    Rng rng(inst.seed);
    std::normal_distribution<double> g(0.0, scale);
    std::bernoulli_distribution coin(0.5);

    inst.X.resize(N, D);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index k = 0; k < D; ++k) inst.X(i, k) = g(rng);
    inst.y.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) inst.y[i] = coin(rng) ? 1.0 : -1.0;
    inst.W.resize(P, D);
    for (Eigen::Index r = 0; r < P; ++r)
      for (Eigen::Index k = 0; k < D; ++k) inst.W(r, k) = g(rng);
    inst.b = Vector::Constant(P, opts.bias);

    // Memorizer positions: the first n entries of a partial shuffle.
    std::vector<std::size_t> slots(p);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(slots[i], slots[pick(rng)]);
    }
    inst.mem.assign(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(n));
    inst.mask.assign(p, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(inst.mem[i]);
      const Vector xi = inst.X.row(static_cast<Eigen::Index>(i)).transpose();
      const Vector e = random_in_ball(d, opts.perturbation_ratio * xi.norm(), rng);
      inst.W.row(row) = (xi + e).transpose();
      inst.mask[inst.mem[i]] = 1;
    }

    // A(i, j) = activation of memorizer j at point i.
    Matrix A(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = 0; j < N; ++j) {
        const auto row = static_cast<Eigen::Index>(inst.mem[static_cast<std::size_t>(j)]);
        A(i, j) = std::max(0.0, inst.W.row(row).dot(inst.X.row(i)) + inst.b[row]);
      }
    }
    inst.a = Vector::Zero(P);
    if (n > 0) {
      const Eigen::FullPivLU<Matrix> lu(A);
      if (!lu.isInvertible()) continue;
      const Vector coeff = lu.solve(inst.y);
      for (Eigen::Index j = 0; j < N; ++j) {
        inst.a[static_cast<Eigen::Index>(inst.mem[static_cast<std::size_t>(j)])] = coeff[j];
      }
    }
    if (!opts.resample_on_failed_checks || verify_saturating(inst).passed) return inst;
    fallback = std::move(inst);
  }
  if (fallback) return *std::move(fallback);
  throw std::runtime_error("build_saturating: interpolation system singular after " +
                           std::to_string(opts.max_attempts) + " draws");
}

const SaturationCheck& SaturationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no saturation check named '" + name + "'");
}

SaturationReport verify_saturating(const SaturatingInstance& inst) {
  const auto N = static_cast<Eigen::Index>(inst.n);
  const double cross_cap = std::pow(static_cast<double>(inst.d), -1.0 / 3.0);

  double norm_dev = 0.0;
  bool norm_ok = true;
  double cross_inner = 0.0;
  double pert_ratio = 0.0;
  double self_dev = 0.0;
  bool self_ok = true;
  double cross_align = 0.0;
  std::size_t exclusivity_breaks = 0;

  for (Eigen::Index i = 0; i < N; ++i) {
    const auto xi = inst.X.row(i);
    const double nrm = xi.norm();
    norm_ok = norm_ok && nrm >= 0.99 && nrm <= 1.01;
    norm_dev = std::max(norm_dev, std::abs(nrm - 1.0));
    const auto wi_row = static_cast<Eigen::Index>(inst.mem[static_cast<std::size_t>(i)]);
    const auto wi = inst.W.row(wi_row);
    pert_ratio = std::max(pert_ratio, (wi - xi).norm() / nrm);
    const double s = wi.dot(xi);
    self_ok = self_ok && s >= 0.9 && s <= 1.1;
    self_dev = std::max(self_dev, std::abs(s - 1.0));
    for (Eigen::Index j = 0; j < N; ++j) {
      const bool active = wi.dot(inst.X.row(j)) + inst.b[wi_row] > 0.0;
      if (active != (i == j)) ++exclusivity_breaks;
      if (j == i) continue;
      cross_inner = std::max(cross_inner, std::abs(xi.dot(inst.X.row(j))));
      cross_align = std::max(cross_align, std::abs(wi.dot(inst.X.row(j))));
    }
  }

  SaturationReport rep;
  const Vector fx = inst.eval_rows(inst.X);
  rep.max_interpolation_error = N > 0 ? (fx - inst.y).cwiseAbs().maxCoeff() : 0.0;

  std::size_t ones = 0;
  for (auto m : inst.mask) ones += m != 0;
  std::vector<std::size_t> sorted_mem = inst.mem;
  std::sort(sorted_mem.begin(), sorted_mem.end());
  bool mask_ok = ones == inst.n && inst.mem.size() == inst.n &&
                 std::adjacent_find(sorted_mem.begin(), sorted_mem.end()) == sorted_mem.end();
  for (auto k : inst.mem) mask_ok = mask_ok && k < inst.p && inst.mask[k] != 0;

  rep.checks.push_back(make_check("norm_range", norm_ok, norm_dev, "||x_i|| in [0.99, 1.01]"));
  rep.checks.push_back(make_check("cross_inner", cross_inner <= cross_cap, cross_inner,
                                  "|<x_i, x_j>| <= d^(-1/3)", false));
  rep.checks.push_back(make_check("perturbation", pert_ratio <= 0.01 * (1.0 + 1e-12), pert_ratio,
                                  "||w_mem(i) - x_i|| <= ||x_i|| / 100"));
  rep.checks.push_back(
      make_check("self_alignment", self_ok, self_dev, "<w_mem(i), x_i> in [0.9, 1.1]"));
  rep.checks.push_back(make_check("cross_alignment", cross_align <= 0.1, cross_align,
                                  "|<w_mem(i), x_j>| <= 1/10 for j != i"));
  rep.checks.push_back(make_check("activation_exclusivity", exclusivity_breaks == 0,
                                  static_cast<double>(exclusivity_breaks),
                                  "w_mem(i)^T x_j + b > 0 iff j = i"));
  rep.checks.push_back(make_check("interpolation", rep.max_interpolation_error < 1e-9,
                                  rep.max_interpolation_error, "max_i |f(x_i) - y_i| < 1e-9"));
  rep.checks.push_back(
      make_check("mask_size", mask_ok, static_cast<double>(ones), "||m||_1 = n, mem distinct"));

  for (const auto& c : rep.checks) {
    if (c.fatal && !c.passed) rep.passed = false;
    if ((c.name == "perturbation" || c.name == "activation_exclusivity" ||
         c.name == "interpolation" || c.name == "mask_size") &&
        !c.passed) {
      rep.structural_passed = false;
    }
  }
  return rep;
}

double estimate_lipschitz(const SaturatingInstance& inst, std::size_t samples, double step,
                          std::uint64_t seed) {
  if (!(step > 0.0)) throw std::invalid_argument("estimate_lipschitz: step must be > 0");
  Rng rng(seed);
  double best = 0.0;
  auto quotient = [&](const Vector& x, const Vector& xp) {
    const double dist = (x - xp).norm();
    if (dist == 0.0) return;
    best = std::max(best, std::abs(inst.eval(x) - inst.eval(xp)) / dist);
  };

  // Random pairs across the ball.
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = random_in_ball(inst.d, kBallRadius, rng);
    quotient(x, clamp_to_ball(x + step * random_unit(inst.d, rng)));
  }
  for (std::size_t i = 0; i < inst.n; ++i) {
    const auto row = static_cast<Eigen::Index>(inst.mem[i]);
    const Vector w = inst.W.row(row).transpose();
    const Vector w_hat = w / w.norm();
    const Vector xi = clamp_to_ball(inst.X.row(static_cast<Eigen::Index>(i)).transpose());
    // Along the unit's own direction at the memorized point.
    quotient(xi, clamp_to_ball(xi + step * w_hat));
    quotient(xi, clamp_to_ball(xi - step * w_hat));
    // Local random pairs around the memorized point.
    const std::size_t local = std::max<std::size_t>(1, samples / std::max<std::size_t>(1, inst.n));
    for (std::size_t s = 0; s < local; ++s) {
      const Vector x = clamp_to_ball(xi + random_in_ball(inst.d, 10.0 * step, rng));
      quotient(x, clamp_to_ball(x + step * random_unit(inst.d, rng)));
    }
    // Straddling the activation boundary along the ray through w, located by
    // bisection on the sign of the pre-activation.
    const double bi = inst.b[row];
    auto pre = [&](double t) { return t * w.norm() + bi; };
    double lo = 0.0;
    double hi = kBallRadius;
    if (pre(lo) <= 0.0 && pre(hi) > 0.0) {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pre(mid) > 0.0 ? hi : lo) = mid;
      }
      const double t0 = std::max(0.0, lo - step);
      const double t1 = std::min(kBallRadius, hi + step);
      quotient(t0 * w_hat, t1 * w_hat);
    }
  }
  return best;
}

SaturationAccount saturating_mi_account(const SaturatingInstance& inst, double W_diam, double J,
                                        double eps) {
  SaturationAccount acc;
  for (auto m : inst.mask) acc.mask_l1 += m != 0;
  acc.nd = static_cast<double>(inst.n) * static_cast<double>(inst.d);
  acc.entropy_cap_bits = log2_binomial(static_cast<double>(inst.p), static_cast<double>(inst.n));
  acc.peff_continuous = peff_continuous(acc.entropy_cap_bits, static_cast<double>(acc.mask_l1),
                                        W_diam, J, eps);
  return acc;
}

}  // namespace prunemi
