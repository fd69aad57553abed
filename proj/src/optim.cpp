// SPDX-License-Identifier: Apache-2.0
#include "gzsl/optim.hpp"

#include <cmath>
#include <vector>

#include "gzsl/errors.hpp"

namespace gzsl {

Adam::Adam(Eigen::Index n, double lr, Eigen::VectorXd lr_scales, double beta1,
           double beta2, double eps)
    : lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      lr_scales_(std::move(lr_scales)),
      m_(Eigen::VectorXd::Zero(n)),
      v_(Eigen::VectorXd::Zero(n)) {
  if (lr_scales_.size() != n) {
    throw DimensionMismatch("lr_scales size does not match parameter count");
  }
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DimensionMismatch("Adam state does not match parameter vector");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_.array().matrix() + (1.0 - beta2_) * grad.array().square().matrix();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * lr_scales_.array() * (m_.array() / c1) /
                    ((v_.array() / c2).sqrt() + eps_);
}

namespace {
std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}
Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}
}  // namespace

nlohmann::json Adam::to_json() const {
  return {{"lr", lr_},         {"beta1", beta1_}, {"beta2", beta2_},
          {"eps", eps_},       {"t", t_},         {"lr_scales", to_vec(lr_scales_)},
          {"m", to_vec(m_)},   {"v", to_vec(v_)}};
}

Adam Adam::from_json(const nlohmann::json& j) {
  Adam a;
  a.lr_ = j.at("lr").get<double>();
  a.beta1_ = j.at("beta1").get<double>();
  a.beta2_ = j.at("beta2").get<double>();
  a.eps_ = j.at("eps").get<double>();
  a.t_ = j.at("t").get<std::int64_t>();
  a.lr_scales_ = from_vec(j.at("lr_scales").get<std::vector<double>>());
  a.m_ = from_vec(j.at("m").get<std::vector<double>>());
  a.v_ = from_vec(j.at("v").get<std::vector<double>>());
  return a;
}

}  // namespace gzsl
