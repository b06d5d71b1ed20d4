// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment rows, their CSV encoding, and mean / standard-error summaries.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace prunemi {

inline constexpr const char* kRecordsHeader = "# prunemi-records v1";

struct ExperimentRecord {
  std::string method;
  double keep = 1.0;
  std::uint64_t seed = 0;
  std::int64_t epoch = 0;  // epoch, round, or sample count depending on the experiment
  std::string metric;
  double value = 0.0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Writes the version comment, the column header and one line per record.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::string records_csv(const std::vector<ExperimentRecord>& records);
/// Parses text produced by write_records_csv.
std::vector<ExperimentRecord> parse_records_csv(const std::string& text);

struct SummaryCell {
  double mean = 0.0;
  std::optional<double> stderr_mean;  // population sd / sqrt(k); absent when k = 1
  std::size_t k = 0;
};

/// method/metric -> keep (or keep@epoch) -> cell.
using Summary = std::map<std::string, std::map<std::string, SummaryCell>>;

/// Mean and standard error of a sample; stderr is absent for k = 1.
SummaryCell summarize_values(const std::vector<double>& values);

/// Groups by (method, metric, keep) and, if `by_epoch`, also by epoch.
Summary summarize(const std::vector<ExperimentRecord>& records, bool by_epoch);

std::string summary_json(const Summary& summary);

}  // namespace prunemi
