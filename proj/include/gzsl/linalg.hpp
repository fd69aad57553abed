// SPDX-License-Identifier: Apache-2.0
//
// Shared numerical primitives: L2 normalization (with its backward pass),
// prototype logits and stable softmax / cross-entropy helpers.
#pragma once

#include <Eigen/Core>

namespace gzsl {

// Below this norm a vector cannot be normalized; raising instead of clamping
// keeps a collapsing encoder visible.
inline constexpr double kNormEpsilon = 1e-12;

// Tolerance used when checking that an embedding is unit norm.
inline constexpr double kUnitTolerance = 1e-6;

// v / ||v||. Throws DegenerateVector when ||v|| <= kNormEpsilon.
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v);

bool is_unit_norm(const Eigen::VectorXd& v, double tol = kUnitTolerance);

// Backward pass of y = v/||v||: given upstream dL/dy, returns dL/dv.
// dL/dv = (g - (g.y) y) / ||v||.
Eigen::VectorXd l2_normalize_backward(const Eigen::VectorXd& v,
                                      const Eigen::VectorXd& grad_out);

// logits[k] = logit_scale * z . prototypes.row(k). Prototypes are expected
// unit norm; dimensions are checked (DimensionMismatch).
Eigen::VectorXd prototype_logits(const Eigen::VectorXd& z,
                                 const Eigen::MatrixXd& prototypes,
                                 double logit_scale = 1.0);

// Numerically stable softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// -log softmax(logits)[label]
double cross_entropy_with_logits(const Eigen::VectorXd& logits, int label);

// d/dlogits of the above: softmax(logits) - onehot(label).
Eigen::VectorXd cross_entropy_grad(const Eigen::VectorXd& logits, int label);

}  // namespace gzsl
