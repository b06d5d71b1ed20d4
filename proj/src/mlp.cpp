// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/mlp.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "prunemi/rng.hpp"

namespace prunemi {

MaskedMlp::MaskedMlp(std::vector<std::size_t> layer_dims, std::uint64_t seed, bool output_clip)
    : dims_(std::move(layer_dims)), seed_(seed), output_clip_(output_clip) {
  build_layout();
  Rng rng(seed);
  for (const auto& l : layout_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (std::size_t k = 0; k < l.in * l.out; ++k) params_[l.weight_offset + k] = uni(rng);
  }
  init_ = params_;
}

MaskedMlp MaskedMlp::restore(std::vector<std::size_t> layer_dims, Vector params,
                             std::vector<std::uint8_t> mask_bits, Vector init_snapshot,
                             std::uint64_t seed, bool output_clip) {
  MaskedMlp net;
  net.dims_ = std::move(layer_dims);
  net.seed_ = seed;
  net.output_clip_ = output_clip;
  net.build_layout();
  if (params.size() != net.params_.size() || init_snapshot.size() != net.params_.size()) {
    throw ShapeError("restore: parameter count does not match layer_dims");
  }
  if (mask_bits.size() != net.mask_.bits.size()) {
    throw ShapeError("restore: mask size does not match layer_dims");
  }
  net.init_ = std::move(init_snapshot);
  net.params_ = std::move(params);
  Mask m = net.mask_;
  m.bits = std::move(mask_bits);
  net.set_mask(m);
  return net;
}

void MaskedMlp::build_layout() {
  if (dims_.size() < 2) throw ShapeError("layer_dims needs at least input and output widths");
  for (auto w : dims_) {
    if (w == 0) throw ShapeError("layer widths must be positive");
  }
  layout_.clear();
  std::size_t p = 0;
  std::size_t m = 0;
  mask_.layer_offsets.clear();
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    LayerLayout lay;
    lay.in = dims_[l];
    lay.out = dims_[l + 1];
    lay.weight_offset = p;
    lay.bias_offset = p + lay.in * lay.out;
    lay.mask_offset = m;
    mask_.layer_offsets.push_back(m);
    p = lay.bias_offset + lay.out;
    m += lay.in * lay.out;
    layout_.push_back(lay);
  }
  mask_.layer_offsets.push_back(m);
  mask_.bits.assign(m, 1);
  params_ = Vector::Zero(static_cast<Eigen::Index>(p));
  param_mask_ = Vector::Ones(static_cast<Eigen::Index>(p));
}

void MaskedMlp::set_params(const Vector& params) {
  if (params.size() != params_.size()) throw ShapeError("set_params: wrong parameter count");
  params_ = params.cwiseProduct(param_mask_);
}

void MaskedMlp::set_mask(const Mask& mask) {
  if (mask.bits.size() != mask_.bits.size()) {
    std::ostringstream os;
    os << "set_mask: mask has " << mask.bits.size() << " entries, network has "
       << mask_.bits.size() << " weights";
    throw ShapeError(os.str());
  }
  mask_.bits = mask.bits;
  param_mask_.setOnes();
  for (std::size_t j = 0; j < mask_.bits.size(); ++j) {
    if (mask_.bits[j] == 0) param_mask_[static_cast<Eigen::Index>(weight_param_index(j))] = 0.0;
  }
  params_ = params_.cwiseProduct(param_mask_);
}

void MaskedMlp::rewind() { params_ = init_.cwiseProduct(param_mask_); }

Eigen::Map<const Matrix> MaskedMlp::weights(std::size_t layer) const {
  const auto& l = layout_.at(layer);
  return {params_.data() + l.weight_offset, static_cast<Eigen::Index>(l.out),
          static_cast<Eigen::Index>(l.in)};
}

Eigen::Map<const Vector> MaskedMlp::bias(std::size_t layer) const {
  const auto& l = layout_.at(layer);
  return {params_.data() + l.bias_offset, static_cast<Eigen::Index>(l.out)};
}

std::size_t MaskedMlp::weight_param_index(std::size_t j) const {
  // Layers are few; a linear scan is fine.
  for (const auto& l : layout_) {
    if (j < l.mask_offset + l.in * l.out) return l.weight_offset + (j - l.mask_offset);
  }
  throw std::out_of_range("weight index out of range");
}

Vector MaskedMlp::gather_weights(const Vector& param_shaped) const {
  if (param_shaped.size() != params_.size()) throw ShapeError("gather_weights: wrong size");
  Vector out(static_cast<Eigen::Index>(num_weights()));
  for (const auto& l : layout_) {
    out.segment(static_cast<Eigen::Index>(l.mask_offset), static_cast<Eigen::Index>(l.in * l.out)) =
        param_shaped.segment(static_cast<Eigen::Index>(l.weight_offset),
                             static_cast<Eigen::Index>(l.in * l.out));
  }
  return out;
}

Matrix MaskedMlp::forward(const Matrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != input_dim()) {
    std::ostringstream os;
    os << "forward: input has " << X.cols() << " columns, network expects " << input_dim();
    throw ShapeError(os.str());
  }
  Matrix a = X;
  for (std::size_t l = 0; l < layout_.size(); ++l) {
    Matrix z = a * weights(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < layout_.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  if (output_clip_) a = a.cwiseMax(-1.0).cwiseMin(1.0);
  return a;
}

Vector MaskedMlp::predict(const Matrix& X) const {
  if (output_dim() != 1) throw ShapeError("predict: network has more than one output");
  return forward(X).col(0);
}

}  // namespace prunemi
