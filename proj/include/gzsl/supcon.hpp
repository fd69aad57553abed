// SPDX-License-Identifier: Apache-2.0
//
// Supervised contrastive loss over a batch of unit-norm projections.
#pragma once

#include <Eigen/Core>
#include <vector>

namespace gzsl {

struct SupConResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;   // dL/dZ, same shape as the input batch
  int active_anchors = 0; // anchors with at least one positive
};

// Mean over anchors i (with nonempty positive set P(i)) of
//   -(1/|P(i)|) sum_{p in P(i)} log[ exp(z_i.z_p / tau)
//                                    / sum_{j != i} exp(z_i.z_j / tau) ].
// Anchors without positives are skipped; if every anchor is skipped the batch
// is unusable and NoPositivePairs is raised. Rows must be unit norm
// (NonUnitInput) and the batch must hold at least two samples.
double supcon_loss(const Eigen::MatrixXd& z, const std::vector<int>& labels,
                   double tau);

SupConResult supcon_loss_with_grad(const Eigen::MatrixXd& z,
                                   const std::vector<int>& labels, double tau);

}  // namespace gzsl
