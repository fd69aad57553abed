// SPDX-License-Identifier: Apache-2.0
#include "gzsl/synthetic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "gzsl/errors.hpp"
#include "gzsl/rng.hpp"

namespace gzsl {

void SyntheticSpec::validate() const {
  if (num_classes < 2) {
    throw InvalidSpec("num_classes must be >= 2");
  }
  if (latent_dim < 1 || obs_dim < latent_dim) {
    throw InvalidSpec("need obs_dim >= latent_dim >= 1");
  }
  if (!(seen_fraction > 0.0 && seen_fraction < 1.0)) {
    throw InvalidSpec("seen_fraction must lie in (0, 1)");
  }
  if (sigma_source < 0.0 || sigma_target < 0.0) {
    throw InvalidSpec("noise scales must be non-negative");
  }
  if (domain_gap < 0.0) {
    throw InvalidSpec("domain_gap must be non-negative");
  }
  if (source_train_per_class < 1 || target_train_per_class < 1 ||
      target_test_per_class < 1) {
    throw InvalidSpec("per-class sample counts must be positive");
  }
  for (const int b : branching) {
    if (b < 1) {
      throw InvalidSpec("branching factors must be positive");
    }
  }
  const auto seen = static_cast<int>(
      std::lround(seen_fraction * static_cast<double>(num_classes)));
  if (seen < 1 || seen >= num_classes) {
    throw InvalidSpec("seen_fraction leaves no seen or no unseen classes");
  }
}

nlohmann::json SyntheticSpec::to_json() const {
  return {{"num_classes", num_classes},
          {"latent_dim", latent_dim},
          {"obs_dim", obs_dim},
          {"seen_fraction", seen_fraction},
          {"sigma_source", sigma_source},
          {"sigma_target", sigma_target},
          {"domain_gap", domain_gap},
          {"source_train_per_class", source_train_per_class},
          {"target_train_per_class", target_train_per_class},
          {"target_test_per_class", target_test_per_class},
          {"branching", branching},
          {"seed", seed}};
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.num_classes = j.value("num_classes", s.num_classes);
  s.latent_dim = j.value("latent_dim", s.latent_dim);
  s.obs_dim = j.value("obs_dim", s.obs_dim);
  s.seen_fraction = j.value("seen_fraction", s.seen_fraction);
  s.sigma_source = j.value("sigma_source", s.sigma_source);
  s.sigma_target = j.value("sigma_target", s.sigma_target);
  s.domain_gap = j.value("domain_gap", s.domain_gap);
  s.source_train_per_class =
      j.value("source_train_per_class", s.source_train_per_class);
  s.target_train_per_class =
      j.value("target_train_per_class", s.target_train_per_class);
  s.target_test_per_class =
      j.value("target_test_per_class", s.target_test_per_class);
  if (j.contains("branching")) {
    const auto b = j.at("branching").get<std::vector<int>>();
    if (b.size() != 3) {
      throw InvalidSpec("branching must have 3 factors");
    }
    s.branching = {b[0], b[1], b[2]};
  }
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

namespace {

std::string padded(const char* prefix, int value) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, value);
  return buf;
}

Taxonomy build_taxonomy(const SyntheticSpec& spec) {
  const int genera_total = spec.branching[0] * spec.branching[1] * spec.branching[2];
  std::vector<SpeciesRecord> records;
  records.reserve(static_cast<std::size_t>(spec.num_classes));
  for (int i = 0; i < spec.num_classes; ++i) {
    const int genus = i % genera_total;
    const int family = genus / spec.branching[2];
    const int order = family / spec.branching[1];
    records.push_back({padded("s", i), padded("g", genus), padded("f", family),
                       padded("o", order)});
  }
  return Taxonomy::from_records(std::move(records));
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();

  SyntheticData data;
  data.taxonomy = build_taxonomy(spec);
  data.classes = data.taxonomy.species_ids();

  const auto seen_count = static_cast<std::size_t>(
      std::lround(spec.seen_fraction * static_cast<double>(spec.num_classes)));
  data.split = make_split(data.taxonomy, seen_count,
                          derive_seed(spec.seed, "synth-split"));

  Rng rng(derive_seed(spec.seed, "synth-model"));

  // Source map: orthonormal columns. Target map: source plus a scaled random
  // perturbation with near-unit columns, so domain_gap reads as a relative
  // deviation.
  const Eigen::MatrixXd g =
      rng.normal_matrix(spec.obs_dim, spec.latent_dim);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  data.map_source =
      qr.householderQ() *
      Eigen::MatrixXd::Identity(spec.obs_dim, spec.latent_dim);
  const Eigen::MatrixXd perturb = rng.normal_matrix(
      spec.obs_dim, spec.latent_dim, 1.0 / std::sqrt(spec.obs_dim));
  data.map_target = data.map_source + spec.domain_gap * perturb;

  const auto rank = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(data.map_target)
                        .rank();
  if (rank < spec.latent_dim) {
    throw InvalidSpec("target domain map is rank deficient");
  }

  data.mu = rng.normal_matrix(spec.num_classes, spec.latent_dim);

  Rng sample_rng(derive_seed(spec.seed, "synth-samples"));
  const auto emit = [&](DomainData& out, const Eigen::MatrixXd& map,
                        double sigma, int per_class, bool seen_only,
                        std::vector<std::string>* ids, const char* tag) {
    std::vector<int> class_indices;
    for (int y = 0; y < spec.num_classes; ++y) {
      if (!seen_only ||
          data.split.is_seen(data.classes[static_cast<std::size_t>(y)])) {
        class_indices.push_back(y);
      }
    }
    out.x.resize(static_cast<Eigen::Index>(class_indices.size()) * per_class,
                 spec.obs_dim);
    out.labels.clear();
    Eigen::Index row = 0;
    for (const int y : class_indices) {
      const Eigen::VectorXd center = map * data.mu.row(y).transpose();
      for (int s = 0; s < per_class; ++s) {
        out.x.row(row) =
            (center + sample_rng.normal_vector(spec.obs_dim, sigma)).transpose();
        out.labels.push_back(y);
        if (ids != nullptr) {
          ids->push_back(std::string(tag) + "-" +
                         data.classes[static_cast<std::size_t>(y)] + "-" +
                         std::to_string(s));
        }
        ++row;
      }
    }
  };

  emit(data.source_train, data.map_source, spec.sigma_source,
       spec.source_train_per_class, /*seen_only=*/false, nullptr, "");
  emit(data.target_train, data.map_target, spec.sigma_target,
       spec.target_train_per_class, /*seen_only=*/true, nullptr, "");
  emit(data.target_test, data.map_target, spec.sigma_target,
       spec.target_test_per_class, /*seen_only=*/false, &data.test_sample_ids,
       "test");
  return data;
}

}  // namespace gzsl
