// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gzsl/taxonomy.hpp"

namespace gzsl {

// Seeded partition of the class set into seen plus 1..4-hop unseen sets.
// Immutable in practice; all id lists are kept sorted so exports are
// byte-stable.
struct Split {
  std::vector<std::string> seen;
  std::array<std::vector<std::string>, 4> hops;  // hops[i-1] = i-hop set
  std::uint64_t seed = 0;
  double seen_fraction = 0.0;

  std::size_t total_classes() const;
  std::vector<std::string> unseen() const;  // sorted union of hop sets
  bool is_seen(const std::string& id) const;
  // 0 for seen, 1..4 for the hop sets, nullopt if the id is not in the split.
  std::optional<int> hop_of(const std::string& id) const;

  // Disjointness, exhaustiveness over the taxonomy, hop consistency.
  void validate(const Taxonomy& tax) const;

  nlohmann::json to_json() const;  // keys: seed, seen, hops
  static Split from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Split load(const std::filesystem::path& path);
};

// Uniform seeded sample of seen_count classes; every remaining class lands in
// the hop set given by its distance to the nearest seen class. Deterministic
// for fixed (taxonomy, seen_count, seed).
Split make_split(const Taxonomy& tax, std::size_t seen_count,
                 std::uint64_t seed);

}  // namespace gzsl
