// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Versioned JSON checkpoints for MaskedMlp:
//   {"format": "prunemi-checkpoint", "version": 1, "layer_dims": [...],
//    "seed": u64, "output_clip": bool, "params": [...], "init_snapshot": [...],
//    "mask": [0/1 ...]}
// Doubles are written with round-trip precision, so load(save(net)) is exact.

#pragma once

#include <filesystem>
#include <string>

#include "prunemi/mlp.hpp"

namespace prunemi {

inline constexpr int kCheckpointVersion = 1;

std::string checkpoint_to_json(const MaskedMlp& net);
MaskedMlp checkpoint_from_json(const std::string& text);

void save_checkpoint(const MaskedMlp& net, const std::filesystem::path& path);
MaskedMlp load_checkpoint(const std::filesystem::path& path);

}  // namespace prunemi
