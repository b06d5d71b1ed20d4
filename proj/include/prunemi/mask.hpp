// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace prunemi {

/// Binary keep-mask over the prunable weights of a MaskedMlp.
///
/// `bits` is flat over all weight matrices (biases are never masked);
/// `layer_offsets[l]` is the position of layer l's first weight, with a final
/// sentinel equal to bits.size().
struct Mask {
  std::vector<std::uint8_t> bits;
  std::vector<std::size_t> layer_offsets;

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t count() const noexcept {
    std::size_t ones = 0;
    for (auto b : bits) ones += (b != 0);
    return ones;
  }
  std::size_t count_in_layer(std::size_t layer) const noexcept {
    std::size_t ones = 0;
    for (std::size_t j = layer_offsets[layer]; j < layer_offsets[layer + 1]; ++j) {
      ones += (bits[j] != 0);
    }
    return ones;
  }
  /// True if some layer has no surviving weight.
  bool has_collapsed_layer() const noexcept {
    for (std::size_t l = 0; l + 1 < layer_offsets.size(); ++l) {
      if (count_in_layer(l) == 0) return true;
    }
    return false;
  }

  friend bool operator==(const Mask&, const Mask&) = default;
};

}  // namespace prunemi
