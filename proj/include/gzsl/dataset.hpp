// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace gzsl {

// In-memory vector dataset. Rows of x are samples; labels index into the
// owning context's ordered class list.
struct DomainData {
  Eigen::MatrixXd x;        // n x dim
  std::vector<int> labels;  // n

  Eigen::Index size() const { return x.rows(); }
  int dim() const { return static_cast<int>(x.cols()); }
};

// Labelled vectors together with their ordered class registry.
struct LabeledVectors {
  std::vector<std::string> classes;  // ordered class ids
  DomainData data;
};

}  // namespace gzsl
