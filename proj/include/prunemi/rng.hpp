// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace prunemi {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to decorrelate seeds derived from small integers.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-cell seed: hash(master_seed, ids...). Order of ids matters.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> ids) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t id : ids) {
    h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  }
  return h;
}

}  // namespace prunemi
