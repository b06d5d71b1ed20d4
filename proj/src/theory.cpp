// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/theory.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace prunemi {
namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw std::invalid_argument(std::string("bound input '") + field + "' must be " + rule);
}

void require_delta(double delta) { require(delta > 0.0 && delta < 1.0, "delta", "in (0, 1)"); }

}  // namespace

double a1() { return std::sqrt(kA1Squared); }

double bits_to_nats(double bits) { return bits * kLn2; }
double nats_to_bits(double nats) { return nats / kLn2; }

void BoundInputs::validate() const {
  require(n >= 1, "n", ">= 1");
  require(d >= 1, "d", ">= 1");
  require(eps > 0 && eps < 1, "eps", "in (0, 1)");
  require_delta(delta);
  require(sigma2 > 0, "sigma2", "> 0");
  require(c > 0, "c", "> 0");
  require(k >= 1, "k", ">= 1");
  require(L >= 0, "L", ">= 0");
  require(W_diam >= 0, "W_diam", ">= 0");
  require(J >= 0, "J", ">= 0");
  require(I_bits >= 0, "I_bits", ">= 0");
  require(gamma >= 0 && gamma < 1, "gamma", "in [0, 1)");
  require(p >= 1, "p", ">= 1");
}

double c0(double c, double L, double n, double d) {
  require(n > 0, "n", "> 0");
  require(d > 0, "d", "> 0");
  return 144.0 * c * L * L / (n * d);
}

double c0(const BoundInputs& in) { return c0(in.c, in.L, in.n, in.d); }

double peff_finite(double I_bits, double expected_log2_Nm) { return I_bits + expected_log2_Nm; }

double peff_continuous(double I_bits, double expected_mask_l1, double W_diam, double J, double eps) {
  require(eps > 0, "eps", "> 0");
  return I_bits + expected_mask_l1 * std::log2(1.0 + 60.0 * W_diam * J / eps);
}

LipschitzBound lipschitz_lower_bound(const BoundInputs& in, double peff) {
  require_delta(in.delta);
  require(in.c > 0, "c", "> 0");
  require(in.eps >= 0, "eps", ">= 0");
  LipschitzBound out;
  const double denom = peff + 0.5 * in.delta * std::log(4.0 / in.delta);
  out.value = in.eps / (96.0 * a1() * std::sqrt(2.0 * in.c)) *
              std::sqrt(in.n * in.d * in.delta / denom);
  out.precondition_lhs = 512.0 * in.k * std::log(8.0 * in.k / in.delta);
  out.precondition_rhs = in.n * in.eps * in.eps;
  out.precondition_met = out.precondition_lhs <= out.precondition_rhs;
  return out;
}

double finite_failure_probability(const BoundInputs& in, double peff) {
  require_delta(in.delta);
  require(in.eps > 0, "eps", "> 0");
  const double cz = c0(in);
  const double e2 = in.eps * in.eps;
  const double first = (2.0 * in.k + 2.0) * std::exp(-in.n * e2 / (512.0 * in.k));
  const double scale = 128.0 * kA1Squared * cz;
  return first + std::max(scale * peff / e2, 2.0 * std::exp(-e2 / scale));
}

double log2_binomial(double n, double k) {
  require(n >= 0, "n", ">= 0");
  require(k >= 0 && k <= n, "k", "in [0, n]");
  // Extended precision keeps the cancellation error far below the result.
  const long double N = n, K = k;
  const long double v = std::lgamma(N + 1.0L) - std::lgamma(K + 1.0L) - std::lgamma(N - K + 1.0L);
  return std::max(0.0, static_cast<double>(v / std::log(2.0L)));
}

EntropyBound entropy_upper_bound(double p, double gamma) {
  require(p >= 0, "p", ">= 0");
  require(gamma >= 0 && gamma <= 1, "gamma", "in [0, 1]");
  EntropyBound b;
  b.exact_bits = log2_binomial(p, gamma * p);
  double h = 0.0;
  if (gamma > 0.0 && gamma < 1.0) {
    h = (1.0 - gamma) * std::log2(1.0 / (1.0 - gamma)) + gamma * std::log2(1.0 / gamma);
  }
  b.asymptotic_bits = p * h;
  return b;
}

double peff_ratio(double gamma) {
  require(gamma >= 0 && gamma <= 1, "gamma", "in [0, 1]");
  if (gamma == 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-gamma) / kLn2;
}

double lemma1_rhs(double C, double I_nats, double delta) {
  require_delta(delta);
  require(C >= 0, "C", ">= 0");
  require(I_nats >= 0, "I", ">= 0");
  return a1() * std::sqrt((C / delta) * I_nats + C * std::log(2.0 / delta));
}

double vc_mi_bound(double d_vc, double m, double I_bits, double delta) {
  require_delta(delta);
  require(d_vc >= 0, "d_vc", ">= 0");
  require(m > d_vc + 1, "m", "> d_vc + 1");
  require(I_bits >= 0, "I", ">= 0");
  const double I = bits_to_nats(I_bits);
  const double vc_term = d_vc > 0 ? std::sqrt(d_vc * std::log(2.0 * M_E * m / d_vc)) : 0.0;
  const double mi_term =
      std::sqrt((4.0 * kA1Squared / delta) * (I + delta * std::log(2.0 / delta)));
  return (4.0 + vc_term + mi_term) / std::sqrt(2.0 * m);
}

double rademacher_mi_bound(double rad_hat, double m, double b, double I_bits, double delta) {
  require_delta(delta);
  require(m > 0, "m", "> 0");
  require(b >= 0, "b", ">= 0");
  require(I_bits >= 0, "I", ">= 0");
  const double I = bits_to_nats(I_bits);
  return 2.0 * rad_hat +
         (6.0 / std::sqrt(m)) *
             std::sqrt((kA1Squared * b / delta) * (I + 0.5 * delta * std::log(4.0 / delta)));
}

double massart(double N, double b, double m) {
  require(N >= 1, "N", ">= 1");
  require(m > 0, "m", "> 0");
  return b * std::sqrt(2.0 * std::log(N)) / std::sqrt(m);
}

namespace {

const std::set<std::string>& extra_keys() {
  static const std::set<std::string> keys{"expected_mask_l1", "expected_log2_Nm", "C", "m",
                                          "d_vc", "rad_hat", "b", "N"};
  return keys;
}

double get_number(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw std::invalid_argument("bound input '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

BoundInputs bound_inputs_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("bounds input is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("bounds input must be a JSON object");
  BoundInputs in;
  const std::pair<const char*, double*> fields[] = {
      {"n", &in.n},         {"d", &in.d},         {"eps", &in.eps},         {"delta", &in.delta},
      {"sigma2", &in.sigma2}, {"c", &in.c},       {"k", &in.k},             {"L", &in.L},
      {"W_diam", &in.W_diam}, {"J", &in.J},       {"I_bits", &in.I_bits},   {"gamma", &in.gamma},
      {"p", &in.p}};
  std::set<std::string> known(extra_keys());
  for (const auto& [name, slot] : fields) {
    known.insert(name);
    if (doc.contains(name)) *slot = get_number(doc, name);
  }
  if (doc.contains("I")) {
    if (doc.contains("I_bits")) throw std::invalid_argument("give only one of 'I' and 'I_bits'");
    in.I_bits = get_number(doc, "I");
  }
  known.insert("I");
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw std::invalid_argument("unknown bound input '" + key + "'");
  }
  in.validate();
  return in;
}

std::string bounds_report_json(const std::string& input_json) {
  const BoundInputs in = bound_inputs_from_json(input_json);
  const auto doc = nlohmann::json::parse(input_json);
  auto opt = [&](const char* key, double fallback) {
    return doc.contains(key) ? get_number(doc, key) : fallback;
  };

  nlohmann::json r;
  r["inputs"] = {{"n", in.n},           {"d", in.d},     {"eps", in.eps},
                 {"delta", in.delta},   {"sigma2", in.sigma2}, {"c", in.c},
                 {"k", in.k},           {"L", in.L},     {"W_diam", in.W_diam},
                 {"J", in.J},           {"I_bits", in.I_bits}, {"gamma", in.gamma},
                 {"p", in.p},           {"a1sq", kA1Squared}};
  const double C0 = c0(in);
  r["c0"] = C0;

  const double mask_l1 = opt("expected_mask_l1", (1.0 - in.gamma) * in.p);
  const double peff_c = peff_continuous(in.I_bits, mask_l1, in.W_diam, in.J, in.eps);
  r["peff_continuous"] = {{"value", peff_c}, {"expected_mask_l1", mask_l1}};
  if (doc.contains("expected_log2_Nm")) {
    const double peff_f = peff_finite(in.I_bits, get_number(doc, "expected_log2_Nm"));
    r["peff_finite"] = {{"value", peff_f},
                        {"failure_probability", finite_failure_probability(in, peff_f)}};
  }

  const LipschitzBound lip = lipschitz_lower_bound(in, peff_c);
  r["lipschitz_lower_bound"] = {{"value", lip.value},
                                {"precondition", lip.precondition_met ? "satisfied" : "violated"},
                                {"precondition_lhs", lip.precondition_lhs},
                                {"precondition_rhs", lip.precondition_rhs}};

  const EntropyBound eb = entropy_upper_bound(in.p, in.gamma);
  r["mask_entropy_bound_bits"] = {{"exact", eb.exact_bits}, {"asymptotic", eb.asymptotic_bits}};
  r["peff_ratio"] = peff_ratio(in.gamma);

  const double C = opt("C", C0);
  r["lemma1_rhs"] = {{"C", C}, {"value", lemma1_rhs(C, bits_to_nats(in.I_bits), in.delta)}};

  if (doc.contains("m")) {
    const double m = get_number(doc, "m");
    if (doc.contains("d_vc")) {
      const double d_vc = get_number(doc, "d_vc");
      if (m > d_vc + 1) {
        r["vc_mi_bound"] = {{"value", vc_mi_bound(d_vc, m, in.I_bits, in.delta)},
                            {"precondition", "satisfied"}};
      } else {
        r["vc_mi_bound"] = {{"value", nullptr}, {"precondition", "violated"}};
      }
    }
    const double b = opt("b", 1.0);
    double rad = opt("rad_hat", -1.0);
    if (rad < 0 && doc.contains("N")) rad = massart(get_number(doc, "N"), b, m);
    if (rad >= 0) {
      r["rademacher_mi_bound"] = {{"value", rademacher_mi_bound(rad, m, b, in.I_bits, in.delta)},
                                  {"rad_hat", rad}};
    }
    if (doc.contains("N")) r["massart"] = massart(get_number(doc, "N"), b, m);
  }
  return r.dump(2) + "\n";
}

}  // namespace prunemi
