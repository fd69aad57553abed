// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gzsl {

std::uint64_t splitmix64(std::uint64_t x);

// One global seed fans out into per-component streams through a fixed
// derivation, so e.g. changing the evaluation seed cannot perturb training.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::uint64_t index = 0);

// Deterministic RNG. mt19937_64 is fully specified by the standard and the
// samplers below avoid implementation-defined std distributions, so a seed
// reproduces the exact same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, spare value cached.
  double normal();

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Inclusive range.
  int uniform_int(int lo, int hi);

  Eigen::VectorXd normal_vector(int n, double scale = 1.0);
  Eigen::MatrixXd normal_matrix(int rows, int cols, double scale = 1.0);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gzsl
