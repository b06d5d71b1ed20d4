// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/records.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace prunemi {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw std::invalid_argument(std::string(what) + " must not contain commas or newlines: " + s);
  }
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("bad ") + what + " field '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kRecordsHeader << '\n' << "method,keep,seed,epoch,metric,value\n";
  for (const auto& r : records) {
    check_field(r.method, "method");
    check_field(r.metric, "metric");
    out << r.method << ',' << format_double(r.keep) << ',' << r.seed << ',' << r.epoch << ','
        << r.metric << ',' << format_double(r.value) << '\n';
  }
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream os;
  write_records_csv(os, records);
  return os.str();
}

std::vector<ExperimentRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ExperimentRecord> out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "method,keep,seed,epoch,metric,value") {
        throw std::invalid_argument("unexpected records header: " + line);
      }
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::invalid_argument("records row needs 6 fields: " + line);
    ExperimentRecord r;
    r.method = f[0];
    r.keep = parse_number<double>(f[1], "keep");
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.epoch = parse_number<std::int64_t>(f[3], "epoch");
    r.metric = f[4];
    r.value = parse_number<double>(f[5], "value");
    out.push_back(std::move(r));
  }
  return out;
}

SummaryCell summarize_values(const std::vector<double>& values) {
  SummaryCell c;
  c.k = values.size();
  if (values.empty()) return c;
  double sum = 0.0;
  for (double v : values) sum += v;
  c.mean = sum / static_cast<double>(c.k);
  if (c.k > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - c.mean) * (v - c.mean);
    const double sd = std::sqrt(ss / static_cast<double>(c.k));
    c.stderr_mean = sd / std::sqrt(static_cast<double>(c.k));
  }
  return c;
}

Summary summarize(const std::vector<ExperimentRecord>& records, bool by_epoch) {
  std::map<std::string, std::map<std::string, std::vector<double>>> groups;
  for (const auto& r : records) {
    std::string key = format_double(r.keep);
    if (by_epoch) key += "@" + std::to_string(r.epoch);
    groups[r.method + "/" + r.metric][key].push_back(r.value);
  }
  Summary s;
  for (const auto& [series, cells] : groups) {
    for (const auto& [key, values] : cells) s[series][key] = summarize_values(values);
  }
  return s;
}

std::string summary_json(const Summary& summary) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [series, cells] : summary) {
    nlohmann::ordered_json inner = nlohmann::ordered_json::object();
    for (const auto& [key, c] : cells) {
      nlohmann::ordered_json cell;
      cell["mean"] = c.mean;
      if (c.stderr_mean) {
        cell["stderr"] = *c.stderr_mean;
      } else {
        cell["stderr"] = nullptr;
      }
      cell["k"] = c.k;
      inner[key] = std::move(cell);
    }
    doc[series] = std::move(inner);
  }
  return doc.dump(2) + "\n";
}

}  // namespace prunemi
