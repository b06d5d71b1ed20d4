// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/idx.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace prunemi {
namespace {

constexpr std::uint32_t kMagicU8Images = 0x00000803;
constexpr std::uint32_t kMagicU8Labels = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) {
    throw IdxParseError(offset, "truncated header: need 4 bytes, have " +
                                    std::to_string(bytes.size() - std::min(offset, bytes.size())));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

IdxParseError::IdxParseError(std::size_t offset, const std::string& what)
    : std::runtime_error("IDX parse error at byte " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0);
  std::size_t rank = 0;
  if (magic == kMagicU8Images) {
    rank = 3;
  } else if (magic == kMagicU8Labels) {
    rank = 1;
  } else {
    std::ostringstream os;
    os << "bad magic 0x" << std::hex << magic;
    throw IdxParseError(0, os.str());
  }
  IdxTensor t;
  std::size_t offset = 4;
  for (std::size_t k = 0; k < rank; ++k, offset += 4) t.dims.push_back(read_be32(bytes, offset));
  const std::size_t count = t.element_count();
  if (bytes.size() - offset < count) {
    throw IdxParseError(bytes.size(), "truncated payload: expected " + std::to_string(count) +
                                          " bytes, found " + std::to_string(bytes.size() - offset));
  }
  t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return t;
}

IdxTensor parse_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_idx(std::span<const std::uint8_t>(bytes));
}

std::vector<std::uint8_t> encode_idx(const IdxTensor& tensor) {
  std::uint32_t magic = 0;
  if (tensor.dims.size() == 3) {
    magic = kMagicU8Images;
  } else if (tensor.dims.size() == 1) {
    magic = kMagicU8Labels;
  } else {
    throw std::invalid_argument("encode_idx: only rank 1 and rank 3 tensors are supported");
  }
  std::vector<std::uint8_t> out;
  auto put = [&](std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  };
  put(magic);
  for (auto d : tensor.dims) put(d);
  out.insert(out.end(), tensor.data.begin(), tensor.data.end());
  return out;
}

}  // namespace prunemi
