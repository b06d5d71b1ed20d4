// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Plug-in (maximum-likelihood) entropy of empirical distributions, in bits.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

namespace prunemi {

/// -sum (c_i / N) log2(c_i / N) over the nonzero counts. Throws on an empty
/// or all-zero count vector.
double plugin_entropy(std::span<const std::uint64_t> counts);

template <typename Key, typename Compare>
double plugin_entropy(const std::map<Key, std::uint64_t, Compare>& counts) {
  std::vector<std::uint64_t> c;
  c.reserve(counts.size());
  for (const auto& [k, v] : counts) c.push_back(v);
  return plugin_entropy(c);
}

template <typename Key, typename Hash>
double plugin_entropy(const std::unordered_map<Key, std::uint64_t, Hash>& counts) {
  std::vector<std::uint64_t> c;
  c.reserve(counts.size());
  for (const auto& [k, v] : counts) c.push_back(v);
  return plugin_entropy(c);
}

/// Shannon entropy in bits of a probability vector (zeros allowed).
double entropy_bits(std::span<const double> probabilities);

}  // namespace prunemi
