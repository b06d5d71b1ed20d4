// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string_view>

namespace prunemi {

using WarningSink = std::function<void(std::string_view)>;

/// Emits a warning (stderr by default).
void warn(std::string_view message);

/// Replaces the warning sink; returns the previous one. An empty sink restores
/// stderr output.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace prunemi
