// SPDX-License-Identifier: Apache-2.0
#include "gzsl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"
#include "gzsl/rng.hpp"

namespace gzsl {

double finite_difference_check(const DifferentiableLoss& loss,
                               const Eigen::VectorXd& params, int probes,
                               std::uint64_t seed, GradCheckOptions options) {
  if (probes < 1) {
    throw std::invalid_argument("finite_difference_check: probes must be >= 1");
  }
  Rng rng(seed);
  const Eigen::VectorXd grad = loss.gradient(params);
  if (!grad.allFinite()) {
    throw NonFiniteLoss("analytic gradient is not finite");
  }

  double worst = 0.0;
  const double h = options.step;
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd dir = rng.normal_vector(static_cast<int>(params.size()));
    dir = l2_normalize(dir);

    const double f_plus = loss.value(params + h * dir);
    const double f_minus = loss.value(params - h * dir);
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
      throw NonFiniteLoss("loss is not finite at probe point");
    }
    const double fd = (f_plus - f_minus) / (2.0 * h);
    const double an = grad.dot(dir);
    const double scale =
        std::max({std::abs(fd), std::abs(an), options.scale_floor});
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  return worst;
}

}  // namespace gzsl
