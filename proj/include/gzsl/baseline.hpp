// SPDX-License-Identifier: Apache-2.0
//
// Photos-only supervised baseline: the same small encoder with a linear
// softmax head over the full label space, trained exclusively on seen-class
// photos. Serves as the collapse comparator for the zero-shot methods.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gzsl/dataset.hpp"
#include "gzsl/nn.hpp"
#include "gzsl/optim.hpp"

namespace gzsl {

struct BaselineConfig {
  int input_dim = 0;
  int hidden_dim = 64;
  int embed_dim = 32;
  double lr = 1e-3;
  int batch_size = 32;
  int iterations = 1000;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static BaselineConfig from_json(const nlohmann::json& j);
};

class SupervisedBaseline {
 public:
  SupervisedBaseline(BaselineConfig cfg, int num_classes);

  double step(const Eigen::MatrixXd& x, const std::vector<int>& labels);
  void train(const DomainData& train_data);

  Eigen::VectorXd predict_logits(const Eigen::VectorXd& x) const;

  const BaselineConfig& config() const { return cfg_; }

 private:
  BaselineConfig cfg_;
  MlpEncoder encoder_;
  LinearClassifier classifier_;
  Adam opt_;
  std::int64_t iteration_ = 0;
};

}  // namespace gzsl
