// SPDX-License-Identifier: Apache-2.0
//
// Four-level label hierarchy (species -> genus -> family -> order) with
// hop-distance queries against a seen set.
#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace gzsl {

struct SpeciesRecord {
  std::string species_id;
  std::string genus;
  std::string family;
  std::string order;

  bool operator==(const SpeciesRecord&) const = default;
};

// Hierarchy levels accepted by ancestor_at_level: 1=genus, 2=family, 3=order.
inline constexpr int kLevelGenus = 1;
inline constexpr int kLevelFamily = 2;
inline constexpr int kLevelOrder = 3;

// Immutable after construction; safe for concurrent reads.
class Taxonomy {
 public:
  // Validates and deduplicates records. Duplicate ids with identical lineage
  // collapse to one; conflicting lineages and genera/families that appear
  // under more than one parent are hard errors.
  static Taxonomy from_records(std::vector<SpeciesRecord> records);

  // Delimited table with header species_id,genus,family,order.
  static Taxonomy parse_csv(const std::string& text);
  static Taxonomy load_csv(const std::filesystem::path& path);

  std::string to_csv() const;  // sorted by species_id, byte-stable
  void export_csv(const std::filesystem::path& path) const;

  std::size_t size() const { return records_.size(); }
  const std::vector<SpeciesRecord>& species() const { return records_; }
  std::vector<std::string> species_ids() const;

  bool contains(const std::string& species_id) const;
  const SpeciesRecord& lineage(const std::string& species_id) const;

  // Genus/family/order name of the species; throws UnknownSpecies.
  std::string ancestor_at_level(const std::string& species_id, int level) const;

  std::size_t genus_count() const { return genus_to_family_.size(); }
  std::size_t family_count() const { return family_to_order_.size(); }
  std::size_t order_count() const { return orders_.size(); }

 private:
  std::vector<SpeciesRecord> records_;  // sorted by species_id
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::string> genus_to_family_;
  std::unordered_map<std::string, std::string> family_to_order_;
  std::unordered_set<std::string> orders_;
};

// Precomputed cover of a seen set, for repeated hop queries.
class SeenCover {
 public:
  SeenCover(const Taxonomy& tax, const std::unordered_set<std::string>& seen);

  // 0: seen; 1: shares a genus with a seen class; 2: family but no genus;
  // 3: order but no family; 4: no shared order.
  int hop(const Taxonomy& tax, const std::string& species_id) const;

 private:
  std::unordered_set<std::string> ids_;
  std::unordered_set<std::string> genera_;
  std::unordered_set<std::string> families_;
  std::unordered_set<std::string> orders_;
};

// Distance of y to the nearest seen class in the taxonomic tree.
int hop_distance(const Taxonomy& tax, const std::string& species_id,
                 const std::unordered_set<std::string>& seen);

}  // namespace gzsl
