// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Experiment criteria run
// through the command-line front end and analyse the CSV it writes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prunemi/autodiff.hpp"
#include "prunemi/cli.hpp"
#include "prunemi/datagen.hpp"
#include "prunemi/mlp.hpp"
#include "prunemi/records.hpp"
#include "prunemi/rng.hpp"
#include "prunemi/saturator.hpp"
#include "prunemi/theory.hpp"
#include "prunemi/verifiers.hpp"

using namespace prunemi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  // True when every failing part is one documented as unattainable; only
  // then does --expect-fail accept the failure.
  bool only_known_gap_failed = false;
};

struct Settings {
  std::uint64_t seed = 0;
  fs::path workdir;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// Drops the trailing "; " left by list-building loops.
std::string trim_sep(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs one CLI invocation; throws on a non-zero exit code.
void cli(std::vector<std::string> args) {
  args.insert(args.begin(), "prunemi");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != kExitOk) {
    throw std::runtime_error("prunemi " + args[1] + " exited with " + std::to_string(code) + ": " +
                             err.str());
  }
}

std::vector<ExperimentRecord> run_csv(const Settings& s, const std::string& sub,
                                      const std::string& tag, std::vector<std::string> args) {
  const fs::path dir = s.workdir / tag;
  fs::create_directories(dir);
  args.insert(args.begin(), sub);
  for (const std::string& a : {std::string("--seed"), std::to_string(s.seed), std::string("--output"),
                               dir.string(), std::string("--formats"), std::string("csv")}) {
    args.push_back(a);
  }
  cli(args);
  std::string stem = sub;
  std::replace(stem.begin(), stem.end(), '-', '_');
  return parse_records_csv(slurp(dir / (stem + ".csv")));
}

struct Stat {
  double mean = 0.0;
  double se = 0.0;
  std::size_t k = 0;
};

Stat stat(const std::vector<double>& v) {
  const SummaryCell c = summarize_values(v);
  return {c.mean, c.stderr_mean.value_or(0.0), c.k};
}

// ---------------------------------------------------------------- 1

double rel_err(const Vector& a, const Vector& b) {
  const double scale = std::max({1e-6, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

Outcome criterion_gradients(const Settings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_g = 0.0, worst_h = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    Rng rng(derive_seed(s.seed, {0xAC01, k}));
    const Loss loss = k % 2 ? Loss::kBinaryCrossEntropy : Loss::kMeanSquaredError;
    std::uniform_int_distribution<int> width(1, 6);
    std::vector<std::size_t> dims{static_cast<std::size_t>(width(rng))};
    const int hidden = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int h = 0; h < hidden; ++h) dims.push_back(static_cast<std::size_t>(width(rng)));
    dims.push_back(1);
    MaskedMlp net(dims, derive_seed(s.seed, {0xAC02, k}));
    Mask mask = net.mask();
    std::bernoulli_distribution keep(0.8);
    for (auto& b : mask.bits) b = keep(rng) ? 1 : 0;
    net.set_mask(mask);
    std::normal_distribution<double> g(0.0, 1.0);
    Vector p = net.params();
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += 0.05 * g(rng);
    net.set_params(p);
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    Matrix X(n, static_cast<Eigen::Index>(dims[0]));
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = loss == Loss::kMeanSquaredError ? g(rng) : (g(rng) > 0 ? 1.0 : -1.0);

    const Vector grad = gradient(net, X, y, loss);
    const double h = 1e-6;
    Vector fd = Vector::Zero(p.size());
    const Vector base = net.params();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (net.param_mask()[i] == 0.0) continue;
      MaskedMlp up = net, down = net;
      Vector q = base;
      q[i] += h;
      up.set_params(q);
      q[i] -= 2 * h;
      down.set_params(q);
      fd[i] = (mean_loss(up, X, y, loss) - mean_loss(down, X, y, loss)) / (2 * h);
    }
    worst_g = std::max(worst_g, rel_err(grad, fd));

    Vector v(p.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng) * net.param_mask()[i];
    const double hv_h = 1e-5;
    MaskedMlp up = net, down = net;
    up.set_params(base + hv_h * v);
    down.set_params(base - hv_h * v);
    const Vector fd_hv = (gradient(up, X, y, loss) - gradient(down, X, y, loss)) / (2 * hv_h);
    worst_h = std::max(worst_h, rel_err(hvp(net, X, y, loss, v), fd_hv));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_g < 1e-4 && worst_h < 1e-3 && secs < 60.0,
          "100 nets; max gradient rel err " + fmt(worst_g) + " (< 1e-4), max hvp rel err " +
              fmt(worst_h) + " (< 1e-3), " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------- 2, 3

struct MemcapData {
  // method -> keep -> per-seed memorized fraction
  std::map<std::string, std::map<double, std::vector<double>>> frac;
};

const MemcapData& memcap_data(const Settings& s) {
  static MemcapData data;
  static bool ready = false;
  if (!ready) {
    const auto recs = run_csv(s, "memcap", "memcap", {"--num_seeds", "50", "--keeps", "1,0.2,0.1,0.05"});
    for (const auto& r : recs) {
      if (r.metric == "memorized_fraction") data.frac[r.method][r.keep].push_back(r.value);
    }
    ready = true;
  }
  return data;
}

Outcome criterion_memcap_order(const Settings& s) {
  const auto& d = memcap_data(s);
  bool ok = true;
  std::string detail;
  for (double keep : {0.2, 0.1, 0.05}) {
    const Stat imp = stat(d.frac.at("imp").at(keep));
    const Stat mag = stat(d.frac.at("magnitude_after").at(keep));
    std::string rival;
    Stat best{-1.0, 0.0, 0};
    for (const char* m : {"snip", "grasp", "synflow", "random"}) {
      const Stat o = stat(d.frac.at(m).at(keep));
      if (o.mean > best.mean) {
        best = o;
        rival = m;
      }
    }
    const double gap = mag.mean - best.mean;
    const double pooled = std::sqrt(mag.se * mag.se + best.se * best.se);
    bool cell = imp.mean >= mag.mean && gap > 0.0;
    if (keep <= 0.1) cell = cell && gap > 2.0 * pooled;
    ok = ok && cell;
    detail += "keep " + fmt(keep) + ": imp " + fmt(imp.mean, 3) + " mag " + fmt(mag.mean, 3) + " " +
              rival + " " + fmt(best.mean, 3) + " gap " + fmt(gap, 3) + " vs 2se " + fmt(2 * pooled, 3) +
              "; ";
  }
  return {ok, "50 seeds; " + detail};
}

Outcome criterion_dense(const Settings& s) {
  const auto& d = memcap_data(s);
  std::vector<double> all;
  double worst = 1.0;
  for (const auto& [method, keeps] : d.frac) {
    const auto& v = keeps.at(1.0);
    all.insert(all.end(), v.begin(), v.end());
    worst = std::min(worst, stat(v).mean);
  }
  const double mean = stat(all).mean;
  return {mean >= 0.99, "keep 1 mean memorized fraction " + fmt(mean, 4) + " over " +
                            std::to_string(all.size()) + " dense runs (lowest method mean " +
                            fmt(worst, 4) + ")"};
}

// ---------------------------------------------------------------- 4, 5

constexpr int kTraceRounds = 12;
constexpr int kTraceEpochs = 100;

struct TraceData {
  // seed -> epoch -> keep -> correlation
  std::map<std::uint64_t, std::map<std::int64_t, std::map<double, double>>> corr;
};

bool trace_ready = false;

const TraceData& trace_data(const Settings& s) {
  static TraceData data;
  bool& ready = trace_ready;
  if (!ready) {
    const auto recs = run_csv(s, "imp-trace", "imp_trace",
                              {"--num_seeds", "25", "--rounds", std::to_string(kTraceRounds),
                               "--eval_every", std::to_string(kTraceEpochs)});
    for (const auto& r : recs) {
      if (r.metric == "noise_correlation") data.corr[r.seed][r.epoch][r.keep] = r.value;
    }
    ready = true;
  }
  return data;
}

// Round r starts after the previous round's prune (smallest keep at its first
// epoch) and ends at the largest keep of its last epoch.
double round_start(const std::map<std::int64_t, std::map<double, double>>& t, int r) {
  return t.at(static_cast<std::int64_t>(r - 1) * kTraceEpochs).begin()->second;
}
double round_end(const std::map<std::int64_t, std::map<double, double>>& t, int r) {
  return t.at(static_cast<std::int64_t>(r) * kTraceEpochs).rbegin()->second;
}

Outcome criterion_sawtooth(const Settings& s) {
  const auto& d = trace_data(s);
  std::size_t cells = 0, rising = 0;
  for (const auto& [seed, t] : d.corr) {
    for (int r = 1; r <= 6; ++r) {
      ++cells;
      rising += round_end(t, r) > round_start(t, r);
    }
  }
  const double frac = static_cast<double>(rising) / static_cast<double>(cells);
  std::vector<double> rounds, means;
  std::string late;
  for (int r = 9; r <= kTraceRounds; ++r) {
    std::vector<double> v;
    for (const auto& [seed, t] : d.corr) v.push_back(round_end(t, r));
    rounds.push_back(r);
    means.push_back(stat(v).mean);
    late += fmt(means.back(), 3) + (r < kTraceRounds ? "," : "");
  }
  const double rbar = stat(rounds).mean, mbar = stat(means).mean;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    num += (rounds[i] - rbar) * (means[i] - mbar);
    den += (rounds[i] - rbar) * (rounds[i] - rbar);
  }
  const double slope = num / den;
  return {frac >= 0.8 && slope < 0.0,
          std::to_string(d.corr.size()) + " seeds; rounds 1-6 rising in " + std::to_string(rising) +
              "/" + std::to_string(cells) + " cells (" + fmt(100 * frac, 3) +
              "%, need >= 80%); end-of-round mean rounds 9-" + std::to_string(kTraceRounds) + " = " +
              late + ", slope " + fmt(slope, 3) + " (need < 0)"};
}

// Gradient RMS of minibatch gradients at initialization on the same task.
double typical_gradient_rms(const Settings& s) {
  auto [data, teacher] = student_teacher(1000, 50, TeacherSpec{}, 1.0, derive_seed(s.seed, {0xAC05}));
  double sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t k = 0; k < 4; ++k) {
    MaskedMlp net({50, 100, 100, 100, 100, 1}, derive_seed(s.seed, {0xAC06, k}));
    for (Eigen::Index b = 0; b + 64 <= data.X.rows(); b += 64) {
      const Vector g = gradient(net, data.X.middleRows(b, 64), data.y.segment(b, 64),
                                Loss::kMeanSquaredError);
      sq += g.squaredNorm() / static_cast<double>(g.size());
      ++count;
    }
  }
  return std::sqrt(sq / static_cast<double>(count));
}

Outcome criterion_gradient_noise(const Settings& s) {
  const double rms = typical_gradient_rms(s);
  // Adam rescales the noisy gradient, so noise only slows the signal; the
  // residual correlation falls roughly as 1/multiple. At 1e5 it sits well
  // below the seed-to-seed scatter.
  const double multiple = 1e5;
  const double noise = multiple * rms;
  const auto recs = run_csv(s, "imp-trace", "gradient_noise",
                            {"--num_seeds", "25", "--rounds", "0", "--eval_every",
                             std::to_string(kTraceEpochs), "--gradient_noise", format_double(noise)});
  std::map<std::uint64_t, std::pair<std::int64_t, double>> last;
  for (const auto& r : recs) {
    if (r.metric != "noise_correlation") continue;
    auto& slot = last[r.seed];
    if (r.epoch >= slot.first) slot = {r.epoch, r.value};
  }
  std::vector<double> v;
  for (const auto& [seed, ev] : last) v.push_back(ev.second);
  const Stat st = stat(v);
  // Noise-free reference: the end of the first IMP round is plain dense training.
  std::string reference;
  if (trace_ready) {
    std::vector<double> ref;
    for (const auto& [seed, t] : trace_data(s).corr) ref.push_back(round_end(t, 1));
    reference = "; noise-free reference " + fmt(stat(ref).mean, 3);
  }
  return {std::abs(st.mean) < 2.0 * st.se,
          "gradient RMS " + fmt(rms, 3) + ", noise std " + fmt(noise, 3) + " (" + fmt(multiple, 2) +
              "x RMS); end correlation " +
              fmt(st.mean, 3) + " +- " + fmt(st.se, 2) + " over " + std::to_string(st.k) +
              " seeds (need |mean| < 2 se)" + reference};
}

// ---------------------------------------------------------------- 6

Outcome criterion_toy_mi(const Settings& s) {
  const auto recs = run_csv(s, "mi-toy", "mi_toy", {"--num_seeds", "5", "--keeps", "0.7,0.6,0.5"});
  std::map<std::string, std::map<double, std::vector<double>>> full;
  std::map<std::pair<std::string, double>, std::map<std::uint64_t, double>> full_by_seed, prefix_by_seed;
  for (const auto& r : recs) {
    if (r.metric == "mask_entropy_bits") {
      full[r.method][r.keep].push_back(r.value);
      full_by_seed[{r.method, r.keep}][r.seed] = r.value;
    } else if (r.metric == "mask_entropy_bits_prefix") {
      prefix_by_seed[{r.method, r.keep}][r.seed] = r.value;
    }
  }
  bool synflow_zero = true;
  for (const auto& [keep, v] : full.at("synflow")) {
    for (double h : v) synflow_zero = synflow_zero && h == 0.0;
  }
  bool order = true;
  std::string detail;
  for (const auto& [keep, v] : full.at("imp")) {
    const double imp = stat(v).mean;
    const double mag = stat(full.at("magnitude_after").at(keep)).mean;
    const double snip = stat(full.at("snip").at(keep)).mean;
    const double grasp = stat(full.at("grasp").at(keep)).mean;
    order = order && std::min(imp, mag) > std::max(snip, grasp);
    detail += "keep " + fmt(keep) + ": imp " + fmt(imp, 3) + " mag " + fmt(mag, 3) + " snip " +
              fmt(snip, 3) + " grasp " + fmt(grasp, 3) + "; ";
  }
  double worst_gap = 0.0;
  for (const auto& [key, seeds] : full_by_seed) {
    for (const auto& [seed, h] : seeds) {
      worst_gap = std::max(worst_gap, std::abs(h - prefix_by_seed.at(key).at(seed)));
    }
  }
  const bool converged = worst_gap < 0.05;
  return {synflow_zero && order && converged,
          std::string("synflow all zero: ") + (synflow_zero ? "yes" : "no") + "; ordering " +
              (order ? "holds" : "fails") + " (" + trim_sep(detail) + "); max |H(1000) - H(32000)| " +
              fmt(worst_gap, 3) + " bits (need < 0.05)",
          synflow_zero && order && !converged};
}

// ---------------------------------------------------------------- 7

// Independent arithmetic paths, arranged differently from the library.
long double o_c0(long double c, long double L, long double n, long double d) {
  return (12.0L * L) * (12.0L * L) * c / n / d;
}
long double o_peff_cont(long double I, long double l1, long double W, long double J, long double eps) {
  return I + l1 * std::log1p(60.0L * W * J / eps) / std::log(2.0L);
}
long double o_lipschitz(long double n, long double d, long double eps, long double delta, long double c,
                        long double peff) {
  // 96 * sqrt(72) * sqrt(2c) = 1152 sqrt(c)
  return eps * std::sqrt(n * d * delta) /
         (1152.0L * std::sqrt(c) * std::sqrt(peff + 0.5L * delta * (2.0L * std::log(2.0L) - std::log(delta))));
}
long double o_log2_binom(std::int64_t n, std::int64_t k) {
  const std::int64_t m = std::min(k, n - k);
  long double s = 0.0L;
  for (std::int64_t i = 1; i <= m; ++i) s += std::log2(static_cast<long double>(n - m + i) / i);
  return s;
}
long double o_h2_bits(long double p, long double g) {
  if (g == 0.0L || g == 1.0L) return 0.0L;
  return -p * (g * std::log2(g) + (1.0L - g) * std::log2(1.0L - g));
}
long double o_peff_ratio(long double g) { return -std::log1p(-g) / std::log(2.0L); }
long double o_lemma1(long double C, long double I, long double delta) {
  return std::sqrt(72.0L * C * (I / delta + std::log(2.0L) - std::log(delta)));
}
long double o_vc(long double dvc, long double m, long double I_bits, long double delta) {
  const long double I = I_bits * std::log(2.0L);
  const long double v = dvc > 0 ? std::sqrt(dvc * (std::log(2.0L) + 1.0L + std::log(m) - std::log(dvc))) : 0.0L;
  return (4.0L + v + std::sqrt(288.0L * (I / delta + std::log(2.0L / delta)))) / std::sqrt(2.0L * m);
}
long double o_rad(long double r, long double m, long double b, long double I_bits, long double delta) {
  const long double I = I_bits * std::log(2.0L);
  return 2.0L * r + 6.0L * std::sqrt(72.0L * b * (I / delta + 0.5L * std::log(4.0L / delta)) / m);
}
long double o_massart(long double N, long double b, long double m) {
  return b * std::sqrt(2.0L * std::log(N) / m);
}

Outcome criterion_calculators(const Settings& s) {
  Rng rng(derive_seed(s.seed, {0xAC07}));
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto LU = [&](double lo, double hi) { return std::exp(U(std::log(lo), std::log(hi))); };
  std::map<std::string, double> worst;
  auto track = [&](const std::string& name, double got, long double want) {
    const long double denom = std::max(std::abs(want), 1e-300L);
    const double e = static_cast<double>(std::abs(static_cast<long double>(got) - want) / denom);
    worst[name] = std::max(worst[name], std::isfinite(e) ? e : 1.0);
  };
  for (int t = 0; t < 1000; ++t) {
    const double n = LU(1, 1e7), d = LU(1, 1e4), c = LU(0.01, 100), L = LU(0.01, 100);
    track("c0", c0(c, L, n, d), o_c0(c, L, n, d));
    const double I = U(0, 1e3), E = U(0, 1e4);
    track("peff_finite", peff_finite(I, E), static_cast<long double>(I) + E);
    const double l1 = LU(1, 1e6), W = LU(1e-3, 1e3), J = LU(1e-3, 1e3), eps = U(1e-3, 1.0);
    track("peff_continuous", peff_continuous(I, l1, W, J, eps), o_peff_cont(I, l1, W, J, eps));
    BoundInputs in;
    in.n = n;
    in.d = d;
    in.eps = eps;
    in.delta = U(1e-4, 0.999);
    in.c = c;
    const double peff = LU(1e-2, 1e7);
    track("lipschitz", lipschitz_lower_bound(in, peff).value,
          o_lipschitz(n, d, eps, in.delta, c, peff));
    const auto p = static_cast<std::int64_t>(LU(1, 2e4));
    const auto k = std::uniform_int_distribution<std::int64_t>(0, p)(rng);
    if (k > 0 && k < p) track("log2_binomial", log2_binomial(static_cast<double>(p), static_cast<double>(k)), o_log2_binom(p, k));
    const double gamma = static_cast<double>(k) / static_cast<double>(p);
    const EntropyBound eb = entropy_upper_bound(static_cast<double>(p), gamma);
    if (k > 0 && k < p) {
      track("entropy_exact", eb.exact_bits, o_log2_binom(p, k));
      track("entropy_asymptotic", eb.asymptotic_bits, o_h2_bits(p, gamma));
    }
    const double g = U(1e-6, 1 - 1e-6);
    track("peff_ratio", peff_ratio(g), o_peff_ratio(g));
    const double delta = U(1e-4, 0.999), C = LU(1e-3, 1e3), Inats = U(0, 100);
    track("lemma1_rhs", lemma1_rhs(C, Inats, delta), o_lemma1(C, Inats, delta));
    const double dvc = std::floor(U(0, 50)), m = dvc + 2 + LU(1, 1e6);
    track("vc_mi_bound", vc_mi_bound(dvc, m, I, delta), o_vc(dvc, m, I, delta));
    const double rad = U(0, 2), b = LU(1e-2, 1e2);
    track("rademacher_mi_bound", rademacher_mi_bound(rad, m, b, I, delta), o_rad(rad, m, b, I, delta));
    const double N = LU(2, 1e9);
    track("massart", massart(N, b, m), o_massart(N, b, m));
  }
  double max_err = 0.0;
  std::string detail;
  for (const auto& [name, e] : worst) {
    max_err = std::max(max_err, e);
    detail += name + " " + fmt(e, 2) + ", ";
  }
  return {max_err < 1e-12, "1000 random inputs; max relative error " + fmt(max_err, 3) +
                               " (< 1e-12): " + detail.substr(0, detail.size() - 2)};
}

// ---------------------------------------------------------------- 8, 9

Outcome criterion_lemma1(const Settings& s) {
  bool ok = true;
  std::string detail;
  for (double delta : {0.05, 0.1}) {
    for (Selector sel : {Selector::kIndependent, Selector::kArgmax}) {
      Lemma1Config cfg;
      cfg.delta = delta;
      cfg.selector = sel;
      cfg.trials = 10000;
      cfg.seed = derive_seed(s.seed, {0xAC08});
      const Lemma1Report r = verify_lemma1(cfg);
      ok = ok && r.violation_frequency <= delta;
      detail += std::string(to_string(sel)) + "@" + fmt(delta) + ": freq " + fmt(r.violation_frequency) +
                " (I " + fmt(r.I_bits, 3) + " bits, rhs " + fmt(r.rhs, 3) + ", max " +
                fmt(r.max_abs_selected, 3) + "); ";
    }
  }
  return {ok, "T=1024, 1e4 trials; " + detail};
}

Outcome criterion_genbounds(const Settings& s) {
  bool ok = true;
  std::string detail;
  for (double delta : {0.05, 0.1}) {
    GenBoundsConfig cfg;
    cfg.delta = delta;
    cfg.selector = Selector::kArgmax;
    cfg.trials = 10000;
    cfg.seed = derive_seed(s.seed, {0xAC09});
    const GenBoundsReport r = verify_genbounds(cfg);
    ok = ok && r.vc_violation_frequency <= delta && r.rad_violation_frequency <= delta;
    detail += "delta " + fmt(delta) + ": vc freq " + fmt(r.vc_violation_frequency) + ", rad freq " +
              fmt(r.rad_violation_frequency) + " (I " + fmt(r.I_bits, 3) + " bits, max gap " +
              fmt(r.max_selected_gap, 3) + ", vc bound " + fmt(r.vc_bound, 3) + ", rad bound " +
              fmt(r.rad_bound, 3) + "); ";
  }
  return {ok, "adversarial selector over 64 classes, 1e4 trials; " + detail};
}

// ---------------------------------------------------------------- 10

Outcome criterion_saturator(const Settings& s) {
  const std::size_t seeds = 20;
  std::size_t passed = 0, structural = 0;
  double worst_interp = 0.0;
  std::map<std::string, std::size_t> failing;
  for (std::size_t k = 0; k < seeds; ++k) {
    const auto inst = build_saturating(20, 400, 2000, derive_seed(s.seed, {0xAC0A, k}));
    const auto rep = verify_saturating(inst);
    passed += rep.passed;
    structural += rep.structural_passed;
    worst_interp = std::max(worst_interp, rep.max_interpolation_error);
    for (const auto& c : rep.checks) {
      if (c.fatal && !c.passed) ++failing[c.name];
    }
  }
  std::map<std::size_t, double> lip;
  for (std::size_t n : {5, 10, 20}) {
    std::vector<double> v;
    for (std::size_t k = 0; k < seeds; ++k) {
      const auto inst = build_saturating(n, 400, 2000, derive_seed(s.seed, {0xAC0B, n, k}));
      v.push_back(estimate_lipschitz(inst, 2000, 1e-3, derive_seed(s.seed, {0xAC0C, n, k})));
    }
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    lip[n] = v[v.size() / 2];
  }
  double lo = 1e300, hi = 0.0;
  for (const auto& [n, v] : lip) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto inst = build_saturating(20, 400, 2000, derive_seed(s.seed, {0xAC0A, 0}));
  const auto acc = saturating_mi_account(inst, 1.0, 1.0, 0.1);
  const double cap_oracle = static_cast<double>(o_log2_binom(2000, 20));
  const bool cap_ok = std::abs(acc.entropy_cap_bits - cap_oracle) < 1e-9 * cap_oracle &&
                      acc.mask_l1 == 20 && acc.mask_l1 < acc.nd;
  const double rate = static_cast<double>(passed) / static_cast<double>(seeds);
  std::string fails;
  for (const auto& [name, cnt] : failing) fails += name + " " + std::to_string(cnt) + ", ";
  if (!fails.empty()) fails = " (failing checks: " + fails.substr(0, fails.size() - 2) + ")";
  const bool rest_ok = worst_interp < 1e-9 && hi < 2.0 * lo && cap_ok && structural == seeds;
  return {rate >= 0.95 && rest_ok,
          "verify pass rate " + fmt(100 * rate, 3) + "% (need >= 95%)" + fails + "; structural pass rate " +
              fmt(100.0 * static_cast<double>(structural) / seeds, 3) + "%; max interpolation error " +
              fmt(worst_interp, 3) + "; median Lipschitz n=5/10/20: " + fmt(lip[5], 4) + "/" +
              fmt(lip[10], 4) + "/" + fmt(lip[20], 4) + " (ratio " + fmt(hi / lo, 3) +
              ", need < 2); mask cap log2 C(2000,20) = " + fmt(acc.entropy_cap_bits, 7) +
              " bits with ||m||_1 = " + std::to_string(acc.mask_l1) + " vs nd = " + fmt(acc.nd, 5),
          rest_ok && rate < 0.95};
}

// ---------------------------------------------------------------- 11

Outcome criterion_determinism(const Settings& s) {
  struct Case {
    std::string sub;
    std::vector<std::string> args;
  };
  const std::vector<Case> cases{
      {"memcap", {"--num_seeds", "3", "--keeps", "1,0.1", "--max_epochs", "60"}},
      {"imp-trace", {"--num_seeds", "2", "--n", "200", "--rounds", "2", "--epochs_per_round", "5",
                     "--fresh_samples", "500"}},
      {"mi-toy", {"--num_seeds", "2", "--num_datasets", "300", "--prefix", "100", "--keeps", "0.6"}},
      {"saturate", {"--num_seeds", "3", "--n", "5", "--d", "50", "--p", "100", "--lipschitz_samples", "50"}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    auto a_args = c.args, b_args = c.args;
    a_args.insert(a_args.end(), {"--workers", "1"});
    b_args.insert(b_args.end(), {"--workers", "2"});
    std::string stem = c.sub;
    std::replace(stem.begin(), stem.end(), '-', '_');
    run_csv(s, c.sub, "det_a_" + stem, a_args);
    run_csv(s, c.sub, "det_b_" + stem, b_args);
    const std::string a = slurp(s.workdir / ("det_a_" + stem) / (stem + ".csv"));
    const std::string b = slurp(s.workdir / ("det_b_" + stem) / (stem + ".csv"));
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += c.sub + (same ? " identical" : " DIFFERS") + " (" + std::to_string(a.size()) + " bytes); ";
  }
  return {ok, "each subcommand run twice with seed " + std::to_string(s.seed) +
                  " (1 vs 2 workers); " + detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prunemi acceptance suite"};
  Settings s;
  std::string workdir = (fs::temp_directory_path() / "prunemi_acceptance").string();
  std::vector<int> only;
  std::vector<int> expect_fail;
  app.add_option("--seed", s.seed, "master seed");
  app.add_option("--workdir", workdir, "scratch directory for CLI outputs");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--expect-fail", expect_fail,
                 "criteria known to be unattainable; they still print FAIL")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  s.workdir = workdir;
  fs::remove_all(s.workdir);
  fs::create_directories(s.workdir);

  const std::vector<std::pair<std::string, std::function<Outcome(const Settings&)>>> criteria{
      {"gradient/hvp correctness", criterion_gradients},
      {"memorization-capacity ordering", criterion_memcap_order},
      {"dense interpolation", criterion_dense},
      {"IMP sawtooth and late decay", criterion_sawtooth},
      {"gradient-noise ablation", criterion_gradient_noise},
      {"toy exact mask MI", criterion_toy_mi},
      {"calculator oracle equivalence", criterion_calculators},
      {"lemma Monte-Carlo", criterion_lemma1},
      {"generalization-bound Monte-Carlo", criterion_genbounds},
      {"saturating construction", criterion_saturator},
      {"determinism", criterion_determinism},
  };
  const std::set<int> wanted(only.begin(), only.end());
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(s);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string tag;
    if (expected.count(id)) {
      if (o.pass) {
        tag = " [listed as expected failure but passed]";
      } else if (o.only_known_gap_failed) {
        tag = " [expected failure]";
      } else {
        tag = " [failed beyond the known gap]";
      }
      unexpected += o.pass || !o.only_known_gap_failed;
    } else {
      unexpected += !o.pass;
    }
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << tag << ": "
              << criteria[i].first << ": " << trim_sep(o.detail) << " [" << fmt(secs, 3) << " s]" << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
