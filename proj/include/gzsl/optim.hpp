// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>

#include <json.hpp>

namespace gzsl {

// Adam over a flat parameter vector. lr_scales lets parameter groups run at
// different effective step sizes (the backbone runs slower than the heads).
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index n, double lr, Eigen::VectorXd lr_scales,
       double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  double learning_rate() const { return lr_; }
  std::int64_t steps_taken() const { return t_; }

  nlohmann::json to_json() const;
  static Adam from_json(const nlohmann::json& j);

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  Eigen::VectorXd lr_scales_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

}  // namespace gzsl
