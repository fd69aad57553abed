// SPDX-License-Identifier: Apache-2.0
#include "gzsl/supcon.hpp"

#include <cmath>
#include <string>

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"

namespace gzsl {

namespace {

struct Terms {
  double loss = 0.0;
  Eigen::MatrixXd coeff;  // dL/ds_ij including the 1/|A| factor
  int active_anchors = 0;
};

Terms compute(const Eigen::MatrixXd& z, const std::vector<int>& labels,
              double tau, bool want_grad) {
  const Eigen::Index n = z.rows();
  if (n < 2) {
    throw InvalidConfig("contrastive batch needs at least 2 samples, got " +
                        std::to_string(n));
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionMismatch("labels size does not match batch size");
  }
  if (!(tau > 0.0)) {
    throw InvalidConfig("temperature must be positive");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_unit_norm(z.row(i).transpose())) {
      throw NonUnitInput("batch row " + std::to_string(i) +
                         " is not unit norm");
    }
  }

  const Eigen::MatrixXd sim = (z * z.transpose()) / tau;

  Terms out;
  if (want_grad) {
    out.coeff = Eigen::MatrixXd::Zero(n, n);
  }

  double total = 0.0;
  int anchors = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> positives;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && labels[j] == labels[i]) {
        positives.push_back(j);
      }
    }
    if (positives.empty()) {
      continue;
    }
    ++anchors;

    double max_s = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) {
        max_s = std::max(max_s, sim(i, j));
      }
    }
    double denom = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) {
        denom += std::exp(sim(i, j) - max_s);
      }
    }
    const double lse = std::log(denom) + max_s;

    const double inv_p = 1.0 / static_cast<double>(positives.size());
    double pos_sum = 0.0;
    for (const auto p : positives) {
      pos_sum += sim(i, p);
    }
    total += lse - inv_p * pos_sum;

    if (want_grad) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          continue;
        }
        double c = std::exp(sim(i, j) - lse);  // softmax over j != i
        if (labels[j] == labels[i]) {
          c -= inv_p;
        }
        out.coeff(i, j) = c;
      }
    }
  }

  if (anchors == 0) {
    throw NoPositivePairs("no anchor in the batch has a positive pair");
  }
  out.loss = total / static_cast<double>(anchors);
  out.active_anchors = anchors;
  if (want_grad) {
    out.coeff /= static_cast<double>(anchors);
  }
  return out;
}

}  // namespace

double supcon_loss(const Eigen::MatrixXd& z, const std::vector<int>& labels,
                   double tau) {
  return compute(z, labels, tau, /*want_grad=*/false).loss;
}

SupConResult supcon_loss_with_grad(const Eigen::MatrixXd& z,
                                   const std::vector<int>& labels, double tau) {
  Terms t = compute(z, labels, tau, /*want_grad=*/true);
  SupConResult res;
  res.loss = t.loss;
  res.active_anchors = t.active_anchors;
  // s_ij = z_i . z_j / tau contributes through both index roles.
  res.grad = (t.coeff + t.coeff.transpose()) * z / tau;
  return res;
}

}  // namespace gzsl
