// SPDX-License-Identifier: Apache-2.0
#include "gzsl/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gzsl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::uint64_t index) {
  return splitmix64(splitmix64(base ^ fnv1a(tag)) + index);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::below: n must be positive");
  }
  if (n == 1) {
    return 0;
  }
  const std::uint64_t min = (-n) % n;  // 2^64 mod n
  std::uint64_t x = 0;
  do {
    x = next_u64();
  } while (x < min);
  return x % n;
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) {
    throw std::invalid_argument("Rng::uniform_int: empty range");
  }
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  return lo + static_cast<int>(below(span));
}

Eigen::VectorXd Rng::normal_vector(int n, double scale) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = scale * normal();
  }
  return v;
}

Eigen::MatrixXd Rng::normal_matrix(int rows, int cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      m(r, c) = scale * normal();
    }
  }
  return m;
}

}  // namespace gzsl
