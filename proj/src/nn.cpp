// SPDX-License-Identifier: Apache-2.0
#include "gzsl/nn.hpp"

#include <cassert>
#include <cmath>

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"

namespace gzsl {

namespace {

void copy_out(std::span<double> dst, std::size_t& off, const double* src,
              std::size_t n) {
  assert(off + n <= dst.size());
  std::copy(src, src + n, dst.data() + off);
  off += n;
}

void copy_in(std::span<const double> src, std::size_t& off, double* dst,
             std::size_t n) {
  assert(off + n <= src.size());
  std::copy(src.data() + off, src.data() + off + n, dst);
  off += n;
}

}  // namespace

void DenseLayer::init_glorot(Rng& rng) {
  const double scale =
      std::sqrt(2.0 / static_cast<double>(weight.rows() + weight.cols()));
  weight = rng.normal_matrix(static_cast<int>(weight.rows()),
                             static_cast<int>(weight.cols()), scale);
  bias.setZero();
}

void DenseLayer::get_params(std::span<double> out) const {
  std::size_t off = 0;
  copy_out(out, off, weight.data(), static_cast<std::size_t>(weight.size()));
  copy_out(out, off, bias.data(), static_cast<std::size_t>(bias.size()));
}

void DenseLayer::set_params(std::span<const double> in) {
  std::size_t off = 0;
  copy_in(in, off, weight.data(), static_cast<std::size_t>(weight.size()));
  copy_in(in, off, bias.data(), static_cast<std::size_t>(bias.size()));
}

Eigen::VectorXd DenseLayer::backward(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& grad_y,
                                     std::span<double> grad_params) const {
  if (!grad_params.empty()) {
    assert(grad_params.size() == param_count());
    Eigen::Map<Eigen::MatrixXd> gw(grad_params.data(), weight.rows(),
                                   weight.cols());
    Eigen::Map<Eigen::VectorXd> gb(grad_params.data() + weight.size(),
                                   bias.size());
    gw.noalias() += grad_y * x.transpose();
    gb += grad_y;
  }
  return weight.transpose() * grad_y;
}

MlpEncoder::MlpEncoder(int input_dim, int hidden_dim, int output_dim,
                       bool normalize_output)
    : in_(input_dim),
      hidden_(hidden_dim),
      out_(output_dim),
      normalize_(normalize_output),
      fc1_(input_dim, hidden_dim),
      fc2_(hidden_dim, output_dim) {}

void MlpEncoder::init_params(Rng& rng) {
  fc1_.init_glorot(rng);
  fc2_.init_glorot(rng);
}

std::size_t MlpEncoder::param_count() const {
  return fc1_.param_count() + fc2_.param_count();
}

void MlpEncoder::get_params(std::span<double> out) const {
  fc1_.get_params(out.subspan(0, fc1_.param_count()));
  fc2_.get_params(out.subspan(fc1_.param_count()));
}

void MlpEncoder::set_params(std::span<const double> in) {
  fc1_.set_params(in.subspan(0, fc1_.param_count()));
  fc2_.set_params(in.subspan(fc1_.param_count()));
}

Eigen::VectorXd MlpEncoder::forward(const Eigen::VectorXd& x) const {
  if (x.size() != in_) {
    throw DimensionMismatch("encoder input dim " + std::to_string(x.size()) +
                            ", expected " + std::to_string(in_));
  }
  const Eigen::VectorXd a = fc1_.forward(x).array().tanh();
  Eigen::VectorXd u = fc2_.forward(a);
  return normalize_ ? l2_normalize(u) : u;
}

Eigen::VectorXd MlpEncoder::backward(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& grad_z,
                                     std::span<double> grad_params) const {
  const Eigen::VectorXd a = fc1_.forward(x).array().tanh();
  const Eigen::VectorXd u = fc2_.forward(a);

  Eigen::VectorXd gu = normalize_ ? l2_normalize_backward(u, grad_z) : grad_z;

  std::span<double> g1, g2;
  if (!grad_params.empty()) {
    g1 = grad_params.subspan(0, fc1_.param_count());
    g2 = grad_params.subspan(fc1_.param_count());
  }
  const Eigen::VectorXd ga = fc2_.backward(a, gu, g2);
  const Eigen::VectorXd gpre =
      (ga.array() * (1.0 - a.array().square())).matrix();
  return fc1_.backward(x, gpre, g1);
}

std::string to_string(HeadKind kind) {
  return kind == HeadKind::identity ? "identity" : "mlp";
}

HeadKind head_kind_from_string(const std::string& s) {
  if (s == "identity") return HeadKind::identity;
  if (s == "mlp") return HeadKind::mlp;
  throw InvalidConfig("unknown projection head kind: " + s);
}

ProjectionHead ProjectionHead::identity() { return ProjectionHead(); }

ProjectionHead ProjectionHead::mlp(int input_dim, int hidden_dim,
                                   int output_dim) {
  ProjectionHead h;
  h.kind_ = HeadKind::mlp;
  h.in_ = input_dim;
  h.hidden_ = hidden_dim;
  h.out_ = output_dim;
  h.fc1_ = DenseLayer(input_dim, hidden_dim);
  h.fc2_ = DenseLayer(hidden_dim, output_dim);
  return h;
}

int ProjectionHead::output_dim(int input_dim) const {
  return kind_ == HeadKind::identity ? input_dim : out_;
}

void ProjectionHead::init_params(Rng& rng) {
  if (kind_ == HeadKind::mlp) {
    fc1_.init_glorot(rng);
    fc2_.init_glorot(rng);
  }
}

std::size_t ProjectionHead::param_count() const {
  return kind_ == HeadKind::identity
             ? 0
             : fc1_.param_count() + fc2_.param_count();
}

void ProjectionHead::get_params(std::span<double> out) const {
  if (kind_ == HeadKind::mlp) {
    fc1_.get_params(out.subspan(0, fc1_.param_count()));
    fc2_.get_params(out.subspan(fc1_.param_count()));
  }
}

void ProjectionHead::set_params(std::span<const double> in) {
  if (kind_ == HeadKind::mlp) {
    fc1_.set_params(in.subspan(0, fc1_.param_count()));
    fc2_.set_params(in.subspan(fc1_.param_count()));
  }
}

Eigen::VectorXd ProjectionHead::forward(const Eigen::VectorXd& z) const {
  if (kind_ == HeadKind::identity) {
    return z;
  }
  const Eigen::VectorXd a = fc1_.forward(z).array().tanh();
  return l2_normalize(fc2_.forward(a));
}

Eigen::VectorXd ProjectionHead::backward(const Eigen::VectorXd& z,
                                         const Eigen::VectorXd& grad_out,
                                         std::span<double> grad_params) const {
  if (kind_ == HeadKind::identity) {
    return grad_out;
  }
  const Eigen::VectorXd a = fc1_.forward(z).array().tanh();
  const Eigen::VectorXd u = fc2_.forward(a);
  const Eigen::VectorXd gu = l2_normalize_backward(u, grad_out);

  std::span<double> g1, g2;
  if (!grad_params.empty()) {
    g1 = grad_params.subspan(0, fc1_.param_count());
    g2 = grad_params.subspan(fc1_.param_count());
  }
  const Eigen::VectorXd ga = fc2_.backward(a, gu, g2);
  const Eigen::VectorXd gpre =
      (ga.array() * (1.0 - a.array().square())).matrix();
  return fc1_.backward(z, gpre, g1);
}

LinearClassifier::LinearClassifier(int input_dim, int num_classes)
    : layer_(input_dim, num_classes) {}

void LinearClassifier::init_params(Rng& rng) { layer_.init_glorot(rng); }

}  // namespace gzsl
