// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference verification harness. Every analytic gradient in the
// toolkit is checked against central differences through this entry point.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace gzsl {

// A scalar loss together with its analytic gradient.
struct DifferentiableLoss {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct GradCheckOptions {
  double step = 1e-5;        // central-difference step, 64-bit arithmetic
  double scale_floor = 1e-6; // relative-error denominator floor
};

// Compares the analytic directional derivative against a central difference
// along `probes` random unit directions and returns the worst relative error.
// Throws NonFiniteLoss if any evaluated loss is not finite.
double finite_difference_check(const DifferentiableLoss& loss,
                               const Eigen::VectorXd& params, int probes,
                               std::uint64_t seed,
                               GradCheckOptions options = {});

}  // namespace gzsl
