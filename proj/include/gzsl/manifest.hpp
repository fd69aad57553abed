// SPDX-License-Identifier: Apache-2.0
//
// Image/feature manifests for real data folders. Records carry the domain
// (illustration vs photo) and a split tag; validation enforces the zero-shot
// contract before any training starts.
#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "gzsl/dataset.hpp"
#include "gzsl/split.hpp"

namespace gzsl {

enum class SampleDomain { illustration, photo };

std::string to_string(SampleDomain d);
SampleDomain sample_domain_from_string(const std::string& s);

struct ManifestRecord {
  std::string path;
  std::string class_id;
  SampleDomain domain = SampleDomain::illustration;
  std::string split_tag = "train";  // optional 4th column; defaults to train
};

struct ManifestOptions {
  bool check_paths = true;  // require referenced files to exist at load
  std::filesystem::path base_dir;  // relative paths resolve against this
};

struct Manifest {
  std::vector<ManifestRecord> records;

  static Manifest load(const std::filesystem::path& path,
                       const ManifestOptions& options = {});
  static Manifest parse(const std::string& text,
                        const ManifestOptions& options = {});
  std::string to_csv() const;
  void save(const std::filesystem::path& path) const;

  std::vector<std::string> class_ids() const;  // sorted unique

  // Every class id must appear in the registry (UnknownClass).
  void validate_classes(const std::vector<std::string>& registry) const;

  // ZSL-mode validation against a split: no photos of unseen classes may be
  // tagged train (UnseenPhotoLeak) and every class needs at least one
  // illustration (EmptyClass).
  void validate_zsl(const Split& split) const;
};

// Feature-vector files: whitespace- or comma-separated decimal floats. This
// is the adapter for manifests of precomputed backbone features; image
// decoding is out of scope for the core.
Eigen::VectorXd load_feature_file(const std::filesystem::path& path);
void save_feature_file(const std::filesystem::path& path,
                       const Eigen::VectorXd& v);

// Loads the feature vectors behind the matching manifest records.
// `classes` fixes the label indexing; sample order follows the manifest.
struct ManifestSelection {
  std::optional<SampleDomain> domain;
  std::optional<std::string> split_tag;
};
struct LoadedSamples {
  std::vector<std::string> sample_ids;  // record paths
  DomainData data;
};
LoadedSamples load_manifest_features(const Manifest& manifest,
                                     const std::vector<std::string>& classes,
                                     const ManifestSelection& select,
                                     const std::filesystem::path& base_dir = {});

}  // namespace gzsl
