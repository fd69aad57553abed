// SPDX-License-Identifier: Apache-2.0
//
// Synthetic two-domain benchmark generator: latent class means observed
// through distinct full-rank per-domain linear maps plus Gaussian noise, with
// a generated 4-level taxonomy. Makes the full pipeline verifiable at desk
// scale without any image data.
#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>

#include <json.hpp>

#include "gzsl/dataset.hpp"
#include "gzsl/split.hpp"
#include "gzsl/taxonomy.hpp"

namespace gzsl {

struct SyntheticSpec {
  int num_classes = 30;
  int latent_dim = 32;
  int obs_dim = 64;
  double seen_fraction = 2.0 / 3.0;
  double sigma_source = 0.8;
  double sigma_target = 0.8;
  // The target map is the source map plus a random perturbation of this
  // relative magnitude; both maps stay full rank.
  double domain_gap = 1.5;
  // Few samples per class on the source side, mirroring how sparse
  // field-guide plates are per species.
  int source_train_per_class = 3;
  int target_train_per_class = 20;
  int target_test_per_class = 10;
  // Top-down tree shape: orders, families per order, genera per family.
  std::array<int, 3> branching = {3, 2, 2};
  std::uint64_t seed = 0;

  void validate() const;  // InvalidSpec
  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

struct SyntheticData {
  Taxonomy taxonomy;
  Split split;
  std::vector<std::string> classes;  // sorted species ids; global label order
  DomainData source_train;           // illustrations, all classes
  DomainData target_train;           // photos, seen classes only
  DomainData target_test;            // photos, all classes
  std::vector<std::string> test_sample_ids;

  // Ground truth, for oracle checks.
  Eigen::MatrixXd mu;          // num_classes x latent_dim
  Eigen::MatrixXd map_source;  // obs_dim x latent_dim
  Eigen::MatrixXd map_target;  // obs_dim x latent_dim
};

// Deterministic per spec.seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace gzsl
