// SPDX-License-Identifier: Apache-2.0
#include "gzsl/linalg.hpp"

#include <cmath>
#include <string>

#include "gzsl/errors.hpp"

namespace gzsl {

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > kNormEpsilon)) {
    throw DegenerateVector("cannot normalize vector with norm " +
                           std::to_string(norm));
  }
  return v / norm;
}

bool is_unit_norm(const Eigen::VectorXd& v, double tol) {
  return std::abs(v.norm() - 1.0) <= tol;
}

Eigen::VectorXd l2_normalize_backward(const Eigen::VectorXd& v,
                                      const Eigen::VectorXd& grad_out) {
  const double norm = v.norm();
  if (!(norm > kNormEpsilon)) {
    throw DegenerateVector("cannot backprop through degenerate normalization");
  }
  const Eigen::VectorXd y = v / norm;
  return (grad_out - grad_out.dot(y) * y) / norm;
}

Eigen::VectorXd prototype_logits(const Eigen::VectorXd& z,
                                 const Eigen::MatrixXd& prototypes,
                                 double logit_scale) {
  if (prototypes.cols() != z.size()) {
    throw DimensionMismatch("prototype dim " + std::to_string(prototypes.cols()) +
                            " vs embedding dim " + std::to_string(z.size()));
  }
  return logit_scale * (prototypes * z);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

double cross_entropy_with_logits(const Eigen::VectorXd& logits, int label) {
  const double m = logits.maxCoeff();
  const double lse = std::log((logits.array() - m).exp().sum()) + m;
  return lse - logits[label];
}

Eigen::VectorXd cross_entropy_grad(const Eigen::VectorXd& logits, int label) {
  Eigen::VectorXd g = softmax(logits);
  g[label] -= 1.0;
  return g;
}

}  // namespace gzsl
