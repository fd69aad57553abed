// SPDX-License-Identifier: Apache-2.0
//
// Small trainable blocks used by both training schemes. Gradients are exact
// analytic backward passes over flat parameter buffers; the same buffers feed
// the optimizer and the finite-difference harness, so the two can never drift
// apart.
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>

#include "gzsl/rng.hpp"

namespace gzsl {

// Contract every feature extractor fulfils: deterministic forward map plus an
// analytic backward that accumulates dL/dtheta and returns dL/dinput.
class EncoderContract {
 public:
  virtual ~EncoderContract() = default;

  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;

  virtual std::size_t param_count() const = 0;
  virtual void get_params(std::span<double> out) const = 0;
  virtual void set_params(std::span<const double> in) = 0;

  virtual Eigen::VectorXd forward(const Eigen::VectorXd& x) const = 0;

  // Accumulates dL/dtheta into grad_params (same layout as get_params) and
  // returns dL/dx. grad_params may be empty to skip parameter gradients.
  virtual Eigen::VectorXd backward(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& grad_z,
                                   std::span<double> grad_params) const = 0;
};

// One dense layer, y = W x + b.
struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  DenseLayer() = default;
  DenseLayer(int in, int out) : weight(Eigen::MatrixXd::Zero(out, in)),
                                bias(Eigen::VectorXd::Zero(out)) {}

  void init_glorot(Rng& rng);

  std::size_t param_count() const {
    return static_cast<std::size_t>(weight.size() + bias.size());
  }
  void get_params(std::span<double> out) const;
  void set_params(std::span<const double> in);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    return weight * x + bias;
  }
  // grad_params layout: [weight (col-major), bias]; returns dL/dx.
  Eigen::VectorXd backward(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& grad_y,
                           std::span<double> grad_params) const;
};

// Two-layer fully connected encoder with tanh, optionally ending in L2
// normalization. The desk-scale stand-in for a large pretrained backbone.
class MlpEncoder final : public EncoderContract {
 public:
  MlpEncoder() = default;
  MlpEncoder(int input_dim, int hidden_dim, int output_dim,
             bool normalize_output = true);

  void init_params(Rng& rng);

  int input_dim() const override { return in_; }
  int hidden_dim() const { return hidden_; }
  int output_dim() const override { return out_; }
  bool normalizes_output() const { return normalize_; }

  std::size_t param_count() const override;
  void get_params(std::span<double> out) const override;
  void set_params(std::span<const double> in) override;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd backward(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& grad_z,
                           std::span<double> grad_params) const override;

 private:
  int in_ = 0, hidden_ = 0, out_ = 0;
  bool normalize_ = true;
  DenseLayer fc1_, fc2_;
};

enum class HeadKind { identity, mlp };

std::string to_string(HeadKind kind);
HeadKind head_kind_from_string(const std::string& s);

// Projection applied to embeddings before contrastive comparison. The
// identity kind returns its input unchanged; the mlp kind is one hidden tanh
// layer followed by L2 normalization, so its output is always unit norm.
class ProjectionHead {
 public:
  ProjectionHead() = default;  // identity
  static ProjectionHead identity();
  static ProjectionHead mlp(int input_dim, int hidden_dim, int output_dim);

  HeadKind kind() const { return kind_; }
  int output_dim(int input_dim) const;

  void init_params(Rng& rng);

  std::size_t param_count() const;
  void get_params(std::span<double> out) const;
  void set_params(std::span<const double> in);

  Eigen::VectorXd forward(const Eigen::VectorXd& z) const;
  Eigen::VectorXd backward(const Eigen::VectorXd& z,
                           const Eigen::VectorXd& grad_out,
                           std::span<double> grad_params) const;

  int mlp_input_dim() const { return in_; }
  int mlp_hidden_dim() const { return hidden_; }
  int mlp_output_dim() const { return out_; }

 private:
  HeadKind kind_ = HeadKind::identity;
  int in_ = 0, hidden_ = 0, out_ = 0;
  DenseLayer fc1_, fc2_;
};

// Plain linear classification head over embeddings.
class LinearClassifier {
 public:
  LinearClassifier() = default;
  LinearClassifier(int input_dim, int num_classes);

  void init_params(Rng& rng);

  int input_dim() const { return layer_.weight.cols(); }
  int num_classes() const { return layer_.weight.rows(); }

  std::size_t param_count() const { return layer_.param_count(); }
  void get_params(std::span<double> out) const { layer_.get_params(out); }
  void set_params(std::span<const double> in) { layer_.set_params(in); }

  Eigen::VectorXd logits(const Eigen::VectorXd& z) const {
    return layer_.forward(z);
  }
  Eigen::VectorXd backward(const Eigen::VectorXd& z,
                           const Eigen::VectorXd& grad_logits,
                           std::span<double> grad_params) const {
    return layer_.backward(z, grad_logits, grad_params);
  }

 private:
  DenseLayer layer_;
};

}  // namespace gzsl
