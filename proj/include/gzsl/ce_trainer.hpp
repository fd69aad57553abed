// SPDX-License-Identifier: Apache-2.0
//
// Contrastive encoding of side-information images: a shared encoder trained
// with classification plus supervised contrastive losses, exported afterwards
// as per-class descriptor vectors.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "gzsl/dataset.hpp"
#include "gzsl/descriptors.hpp"
#include "gzsl/gradcheck.hpp"
#include "gzsl/nn.hpp"
#include "gzsl/optim.hpp"

namespace gzsl {

struct CeConfig {
  int input_dim = 0;  // resolved from data when 0
  int hidden_dim = 64;
  int embed_dim = 32;
  bool encoder_normalize = true;
  HeadKind head = HeadKind::mlp;
  int head_hidden = 32;
  double tau = 0.1;
  double lr = 1e-3;
  double backbone_lr_scale = 1.0;
  int batch_classes = 5;
  int samples_per_class = 2;
  int iterations = 200;
  int log_every = 20;
  std::uint64_t seed = 0;

  void validate() const;  // InvalidConfig
  nlohmann::json to_json() const;
  static CeConfig from_json(const nlohmann::json& j);
};

struct CeStepLosses {
  double cls = 0.0;
  double cont = 0.0;
  double total() const { return cls + cont; }
};

class CeTrainer {
 public:
  CeTrainer(CeConfig cfg, int num_classes);

  // Losses on a batch without touching parameters.
  CeStepLosses eval_losses(const Eigen::MatrixXd& x,
                           const std::vector<int>& labels) const;

  // One optimizer update; returns the pre-update loss components.
  CeStepLosses step(const Eigen::MatrixXd& x, const std::vector<int>& labels);

  // Class-balanced batch for the given iteration, reproducible from the seed.
  void sample_batch(const LabeledVectors& data, std::int64_t iteration,
                    Eigen::MatrixXd& x, std::vector<int>& labels) const;

  // Runs cfg.iterations steps over the data.
  void train(const LabeledVectors& data,
             const std::function<void(std::int64_t, const CeStepLosses&)>&
                 log_sink = nullptr);

  std::vector<ClassDescriptor> descriptors(const LabeledVectors& data) const;

  const MlpEncoder& encoder() const { return encoder_; }
  const CeConfig& config() const { return cfg_; }
  std::int64_t iteration() const { return iteration_; }

  // Flat parameter access ([encoder | head | classifier]) and the combined
  // loss as a differentiable function of it, for gradient verification.
  std::size_t param_count() const;
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& theta);
  DifferentiableLoss make_loss(Eigen::MatrixXd x,
                               std::vector<int> labels) const;

 private:
  CeStepLosses losses_and_grad(const Eigen::MatrixXd& x,
                               const std::vector<int>& labels,
                               Eigen::VectorXd* grad) const;

  CeConfig cfg_;
  int num_classes_ = 0;
  MlpEncoder encoder_;
  ProjectionHead head_;
  LinearClassifier classifier_;
  Adam opt_;
  std::int64_t iteration_ = 0;
};

}  // namespace gzsl
