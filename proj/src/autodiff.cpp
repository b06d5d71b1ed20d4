// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/autodiff.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace prunemi {
namespace {

double softplus(double s) { return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))); }
double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

void check_batch(const MaskedMlp& net, const Matrix& X, const Vector& y) {
  if (net.output_dim() != 1) throw ShapeError("losses need a single-output network");
  if (X.rows() == 0) throw ShapeError("empty batch");
  if (X.rows() != y.size()) {
    std::ostringstream os;
    os << "batch has " << X.rows() << " rows but " << y.size() << " labels";
    throw ShapeError(os.str());
  }
  if (static_cast<std::size_t>(X.cols()) != net.input_dim()) {
    std::ostringstream os;
    os << "input has " << X.cols() << " columns, network expects " << net.input_dim();
    throw ShapeError(os.str());
  }
}

// Activations kept for the backward pass. z[l] is the pre-activation of layer
// l, a[l] the input to layer l (a[0] = X).
struct Tape {
  std::vector<Matrix> z;
  std::vector<Matrix> a;
  Vector raw_out;
  Vector out;
  Vector clip_grad;  // d out / d raw_out
};

Tape record(const MaskedMlp& net, const Matrix& X) {
  Tape t;
  const std::size_t L = net.num_layers();
  t.a.reserve(L);
  t.z.reserve(L);
  t.a.push_back(X);
  for (std::size_t l = 0; l < L; ++l) {
    Matrix z = t.a.back() * net.weights(l).transpose();
    z.rowwise() += net.bias(l).transpose();
    if (l + 1 < L) t.a.push_back(z.cwiseMax(0.0));
    t.z.push_back(std::move(z));
  }
  t.raw_out = t.z.back().col(0);
  if (net.output_clip()) {
    t.out = t.raw_out.cwiseMax(-1.0).cwiseMin(1.0);
    t.clip_grad = (t.raw_out.array().abs() < 1.0).cast<double>().matrix();
  } else {
    t.out = t.raw_out;
    t.clip_grad = Vector::Ones(t.raw_out.size());
  }
  return t;
}

Matrix relu_grad(const Matrix& z) { return (z.array() > 0.0).cast<double>().matrix(); }

// First and second derivative of the per-example loss with respect to the
// output.
void loss_derivatives(const Vector& out, const Vector& y, Loss loss, Vector& d1, Vector& d2) {
  const Eigen::Index n = out.size();
  d1.resize(n);
  d2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (loss == Loss::kMeanSquaredError) {
      d1[i] = 2.0 * (out[i] - y[i]);
      d2[i] = 2.0;
    } else {
      const double s = sigmoid(out[i]);
      d1[i] = s - 0.5 * (y[i] + 1.0);
      d2[i] = s * (1.0 - s);
    }
  }
}

Eigen::Map<Matrix> weight_block(Vector& v, const LayerLayout& l) {
  return {v.data() + l.weight_offset, static_cast<Eigen::Index>(l.out),
          static_cast<Eigen::Index>(l.in)};
}
Eigen::Map<const Matrix> weight_block(const Vector& v, const LayerLayout& l) {
  return {v.data() + l.weight_offset, static_cast<Eigen::Index>(l.out),
          static_cast<Eigen::Index>(l.in)};
}
Eigen::Map<Vector> bias_block(Vector& v, const LayerLayout& l) {
  return {v.data() + l.bias_offset, static_cast<Eigen::Index>(l.out)};
}
Eigen::Map<const Vector> bias_block(const Vector& v, const LayerLayout& l) {
  return {v.data() + l.bias_offset, static_cast<Eigen::Index>(l.out)};
}

// Backpropagates an (n x 1) output sensitivity into a parameter gradient.
Vector backprop(const MaskedMlp& net, const Tape& t, const Vector& out_sens) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(net.num_params()));
  Matrix delta = out_sens;
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    const auto& lay = net.layout(l);
    weight_block(g, lay).noalias() = delta.transpose() * t.a[l];
    bias_block(g, lay) = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix back = delta * net.weights(l);
      delta = back.cwiseProduct(relu_grad(t.z[l - 1]));
    }
  }
  return g.cwiseProduct(net.param_mask());
}

}  // namespace

Loss parse_loss(std::string_view name) {
  if (name == "mse") return Loss::kMeanSquaredError;
  if (name == "bce" || name == "cross-entropy" || name == "ce") return Loss::kBinaryCrossEntropy;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "' (expected mse or bce)");
}

std::string_view to_string(Loss loss) noexcept {
  return loss == Loss::kMeanSquaredError ? "mse" : "bce";
}

NonFiniteLossError::NonFiniteLossError(std::size_t sample_index, double value)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "non-finite loss " << value << " at sample " << sample_index;
        return os.str();
      }()),
      sample_index_(sample_index) {}

Vector per_example_loss(const Vector& outputs, const Vector& y, Loss loss) {
  if (outputs.size() != y.size()) throw ShapeError("per_example_loss: size mismatch");
  Vector out(outputs.size());
  for (Eigen::Index i = 0; i < outputs.size(); ++i) {
    if (loss == Loss::kMeanSquaredError) {
      const double r = outputs[i] - y[i];
      out[i] = r * r;
    } else {
      out[i] = softplus(outputs[i]) - 0.5 * (y[i] + 1.0) * outputs[i];
    }
    if (!std::isfinite(out[i])) throw NonFiniteLossError(static_cast<std::size_t>(i), out[i]);
  }
  return out;
}

double mean_loss(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss) {
  check_batch(net, X, y);
  return per_example_loss(net.predict(X), y, loss).mean();
}

double sign_accuracy(const Vector& outputs, const Vector& y) {
  if (outputs.size() == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < outputs.size(); ++i) {
    hits += ((outputs[i] > 0.0) == (y[i] > 0.0)) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(outputs.size());
}

Vector gradient(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss,
                double& loss_out) {
  check_batch(net, X, y);
  const Tape t = record(net, X);
  loss_out = per_example_loss(t.out, y, loss).mean();
  Vector d1;
  Vector d2;
  loss_derivatives(t.out, y, loss, d1, d2);
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  Vector sens = (d1.cwiseProduct(t.clip_grad)) * inv_n;
  return backprop(net, t, sens);
}

Vector gradient(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss) {
  double unused = 0.0;
  return gradient(net, X, y, loss, unused);
}

Vector hvp(const MaskedMlp& net, const Matrix& X, const Vector& y, Loss loss, const Vector& v_in) {
  check_batch(net, X, y);
  if (static_cast<std::size_t>(v_in.size()) != net.num_params()) {
    throw ShapeError("hvp: direction must have one entry per parameter");
  }
  const Vector v = v_in.cwiseProduct(net.param_mask());
  const Tape t = record(net, X);
  per_example_loss(t.out, y, loss);  // surfaces non-finite losses
  const std::size_t L = net.num_layers();
  const Eigen::Index n = X.rows();

  // Forward pass of directional derivatives: rz[l] = d z_l, ra[l] = d a_l.
  std::vector<Matrix> ra(L);
  std::vector<Matrix> rz(L);
  ra[0] = Matrix::Zero(n, X.cols());
  for (std::size_t l = 0; l < L; ++l) {
    const auto& lay = net.layout(l);
    Matrix r = ra[l] * net.weights(l).transpose();
    r.noalias() += t.a[l] * weight_block(v, lay).transpose();
    r.rowwise() += bias_block(v, lay).transpose();
    if (l + 1 < L) ra[l + 1] = r.cwiseProduct(relu_grad(t.z[l]));
    rz[l] = std::move(r);
  }
  const Vector r_out = rz.back().col(0).cwiseProduct(t.clip_grad);

  Vector d1;
  Vector d2;
  loss_derivatives(t.out, y, loss, d1, d2);
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix delta = d1.cwiseProduct(t.clip_grad) * inv_n;
  Matrix rdelta = d2.cwiseProduct(r_out).cwiseProduct(t.clip_grad) * inv_n;

  Vector hv = Vector::Zero(static_cast<Eigen::Index>(net.num_params()));
  for (std::size_t l = L; l-- > 0;) {
    const auto& lay = net.layout(l);
    auto hw = weight_block(hv, lay);
    hw.noalias() = rdelta.transpose() * t.a[l];
    hw.noalias() += delta.transpose() * ra[l];
    bias_block(hv, lay) = rdelta.colwise().sum().transpose();
    if (l > 0) {
      const Matrix gate = relu_grad(t.z[l - 1]);
      Matrix next_r = rdelta * net.weights(l);
      next_r.noalias() += delta * weight_block(v, lay);
      Matrix next = delta * net.weights(l);
      rdelta = next_r.cwiseProduct(gate);
      delta = next.cwiseProduct(gate);
    }
  }
  return hv.cwiseProduct(net.param_mask());
}

Vector output_sum_gradient(const MaskedMlp& net, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != net.input_dim()) {
    throw ShapeError("output_sum_gradient: input width mismatch");
  }
  Vector g = Vector::Zero(static_cast<Eigen::Index>(net.num_params()));
  std::vector<Matrix> z;
  std::vector<Matrix> a{X};
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Matrix zl = a.back() * net.weights(l).transpose();
    zl.rowwise() += net.bias(l).transpose();
    if (l + 1 < net.num_layers()) a.push_back(zl.cwiseMax(0.0));
    z.push_back(std::move(zl));
  }
  Matrix delta = Matrix::Ones(X.rows(), static_cast<Eigen::Index>(net.output_dim()));
  if (net.output_clip()) delta = delta.cwiseProduct((z.back().array().abs() < 1.0).cast<double>().matrix());
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    const auto& lay = net.layout(l);
    weight_block(g, lay).noalias() = delta.transpose() * a[l];
    bias_block(g, lay) = delta.colwise().sum().transpose();
    if (l > 0) delta = (delta * net.weights(l)).cwiseProduct(relu_grad(z[l - 1]));
  }
  return g.cwiseProduct(net.param_mask());
}

}  // namespace prunemi
