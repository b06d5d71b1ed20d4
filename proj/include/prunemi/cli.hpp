// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: one subcommand per experiment or calculator. Every
// experiment parameter can come from a flat JSON config (--config) and be
// overridden by the matching flag.
//
// Exit codes: 0 ok, 1 configuration error, 2 some seed cells failed.

#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "prunemi/records.hpp"

namespace prunemi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

/// Outcome of a sweep: records of all successful cells in cell order, and a
/// message per failed cell.
struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<std::string> failures;
};

/// Runs `cells` independent jobs on `workers` threads (0 = hardware
/// concurrency). Results are merged in cell order, so the output does not
/// depend on the worker count. A throwing cell is recorded as a failure.
SweepResult run_cells(std::size_t cells, std::size_t workers,
                      const std::function<std::vector<ExperimentRecord>(std::size_t)>& job);

/// Entry point of the `prunemi` binary.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prunemi
