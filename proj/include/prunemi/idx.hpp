// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reader for the big-endian IDX format used by MNIST-style datasets.
// Supported: magic 0x00000803 (u8, 3 dims: images) and 0x00000801 (u8, 1 dim:
// labels).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace prunemi {

struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;  // row-major

  std::size_t element_count() const noexcept {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

class IdxParseError : public std::runtime_error {
 public:
  IdxParseError(std::size_t offset, const std::string& what);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
IdxTensor parse_idx(const std::filesystem::path& path);

/// Encodes a tensor back to IDX bytes (u8 payload).
std::vector<std::uint8_t> encode_idx(const IdxTensor& tensor);

}  // namespace prunemi
