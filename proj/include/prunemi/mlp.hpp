// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense multi-layer perceptron with per-weight binary masks.
//
// Parameters live in one flat vector laid out layer by layer as
// [W_0, b_0, W_1, b_1, ...]. Each W_l is an (out x in) matrix stored
// column-major, so weight (r, c) of layer l sits at weight_offset + c*out + r.
// The mask covers weights only, in the same order with biases skipped.
//
// A network with layer_dims {d, h_1, ..., h_k, o} has k+1 weight matrices and
// k ReLU hidden layers; the output layer is linear, optionally clamped to
// [-1, 1].

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prunemi/mask.hpp"

namespace prunemi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LayerLayout {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;  // into the parameter vector
  std::size_t bias_offset = 0;    // into the parameter vector
  std::size_t mask_offset = 0;    // into Mask::bits
};

class MaskedMlp {
 public:
  MaskedMlp() = default;

  /// Builds a dense network. Weights are drawn per layer uniformly in
  /// +-sqrt(6 / (fan_in + fan_out)); biases start at zero.
  MaskedMlp(std::vector<std::size_t> layer_dims, std::uint64_t seed, bool output_clip = false);

  /// Reassembles a network from stored state (checkpoints). The mask is
  /// re-applied to `params`.
  static MaskedMlp restore(std::vector<std::size_t> layer_dims, Vector params,
                           std::vector<std::uint8_t> mask_bits, Vector init_snapshot,
                           std::uint64_t seed, bool output_clip);

  const std::vector<std::size_t>& layer_dims() const noexcept { return dims_; }
  std::size_t num_layers() const noexcept { return layout_.size(); }
  std::size_t input_dim() const noexcept { return dims_.front(); }
  std::size_t output_dim() const noexcept { return dims_.back(); }
  std::size_t num_params() const noexcept { return static_cast<std::size_t>(params_.size()); }
  std::size_t num_weights() const noexcept { return mask_.bits.size(); }
  const LayerLayout& layout(std::size_t layer) const { return layout_.at(layer); }
  std::uint64_t seed() const noexcept { return seed_; }

  bool output_clip() const noexcept { return output_clip_; }
  void set_output_clip(bool on) noexcept { output_clip_ = on; }

  const Vector& params() const noexcept { return params_; }
  /// Replaces all parameters; masked weights are forced back to zero.
  void set_params(const Vector& params);
  const Vector& init_snapshot() const noexcept { return init_; }

  const Mask& mask() const noexcept { return mask_; }
  /// Installs a mask and zeroes every weight it removes.
  void set_mask(const Mask& mask);
  /// 1.0 where a parameter is trainable (kept weight or any bias), else 0.0.
  const Vector& param_mask() const noexcept { return param_mask_; }

  /// Restores the initialization snapshot, then re-applies the mask.
  void rewind();

  Eigen::Map<const Matrix> weights(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  /// Parameter index of prunable weight j.
  std::size_t weight_param_index(std::size_t j) const;
  /// Extracts the prunable-weight entries of a parameter-shaped vector.
  Vector gather_weights(const Vector& param_shaped) const;

  /// Row-per-sample evaluation: X is (n x input_dim), result (n x output_dim).
  Matrix forward(const Matrix& X) const;
  /// forward() for single-output networks, as a column vector.
  Vector predict(const Matrix& X) const;

 private:
  void build_layout();

  std::vector<std::size_t> dims_;
  std::vector<LayerLayout> layout_;
  Vector params_;
  Vector init_;
  Vector param_mask_;
  Mask mask_;
  std::uint64_t seed_ = 0;
  bool output_clip_ = false;
};

}  // namespace prunemi
