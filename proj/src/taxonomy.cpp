// SPDX-License-Identifier: Apache-2.0
#include "gzsl/taxonomy.hpp"

#include <algorithm>
#include <sstream>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"

namespace gzsl {

Taxonomy Taxonomy::from_records(std::vector<SpeciesRecord> records) {
  if (records.empty()) {
    throw InvalidRecord("taxonomy has no rows");
  }
  for (auto& r : records) {
    r.species_id = trim(r.species_id);
    r.genus = trim(r.genus);
    r.family = trim(r.family);
    r.order = trim(r.order);
    if (r.species_id.empty() || r.genus.empty() || r.family.empty() ||
        r.order.empty()) {
      throw InvalidRecord("species '" + r.species_id +
                          "' has an empty lineage field");
    }
  }
  std::sort(records.begin(), records.end(),
            [](const SpeciesRecord& a, const SpeciesRecord& b) {
              return a.species_id < b.species_id;
            });

  Taxonomy tax;
  for (auto& r : records) {
    if (!tax.records_.empty() && tax.records_.back().species_id == r.species_id) {
      if (tax.records_.back() == r) {
        continue;  // identical duplicate row
      }
      throw DuplicateSpeciesConflict("species '" + r.species_id +
                                     "' appears with two different lineages");
    }
    const auto [git, ginserted] = tax.genus_to_family_.emplace(r.genus, r.family);
    if (!ginserted && git->second != r.family) {
      throw InconsistentLineage("genus '" + r.genus + "' appears under families '" +
                                git->second + "' and '" + r.family + "'");
    }
    const auto [fit, finserted] = tax.family_to_order_.emplace(r.family, r.order);
    if (!finserted && fit->second != r.order) {
      throw InconsistentLineage("family '" + r.family + "' appears under orders '" +
                                fit->second + "' and '" + r.order + "'");
    }
    tax.orders_.insert(r.order);
    tax.index_.emplace(r.species_id, tax.records_.size());
    tax.records_.push_back(std::move(r));
  }
  return tax;
}

Taxonomy Taxonomy::parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidRecord("empty taxonomy table");
  }
  const auto header = split_fields(line);
  const std::vector<std::string> required = {"species_id", "genus", "family",
                                             "order"};
  std::vector<std::size_t> col(required.size());
  for (std::size_t i = 0; i < required.size(); ++i) {
    const auto it = std::find(header.begin(), header.end(), required[i]);
    if (it == header.end()) {
      throw MissingColumn("taxonomy table is missing column '" + required[i] + "'");
    }
    col[i] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<SpeciesRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < header.size()) {
      throw InvalidRecord("taxonomy line " + std::to_string(lineno) +
                          " has too few fields");
    }
    records.push_back(SpeciesRecord{fields[col[0]], fields[col[1]],
                                    fields[col[2]], fields[col[3]]});
  }
  return from_records(std::move(records));
}

Taxonomy Taxonomy::load_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path));
}

std::string Taxonomy::to_csv() const {
  std::ostringstream out;
  out << "species_id,genus,family,order\n";
  for (const auto& r : records_) {
    out << r.species_id << ',' << r.genus << ',' << r.family << ',' << r.order
        << '\n';
  }
  return out.str();
}

void Taxonomy::export_csv(const std::filesystem::path& path) const {
  write_text_file(path, to_csv());
}

std::vector<std::string> Taxonomy::species_ids() const {
  std::vector<std::string> ids;
  ids.reserve(records_.size());
  for (const auto& r : records_) {
    ids.push_back(r.species_id);
  }
  return ids;
}

bool Taxonomy::contains(const std::string& species_id) const {
  return index_.contains(species_id);
}

const SpeciesRecord& Taxonomy::lineage(const std::string& species_id) const {
  const auto it = index_.find(species_id);
  if (it == index_.end()) {
    throw UnknownSpecies("unknown species '" + species_id + "'");
  }
  return records_[it->second];
}

std::string Taxonomy::ancestor_at_level(const std::string& species_id,
                                        int level) const {
  const auto& r = lineage(species_id);
  switch (level) {
    case kLevelGenus:
      return r.genus;
    case kLevelFamily:
      return r.family;
    case kLevelOrder:
      return r.order;
    default:
      throw InvalidConfig("ancestor level must be 1, 2 or 3, got " +
                          std::to_string(level));
  }
}

SeenCover::SeenCover(const Taxonomy& tax,
                     const std::unordered_set<std::string>& seen) {
  for (const auto& id : seen) {
    const auto& r = tax.lineage(id);  // throws UnknownSpecies
    ids_.insert(id);
    genera_.insert(r.genus);
    families_.insert(r.family);
    orders_.insert(r.order);
  }
}

int SeenCover::hop(const Taxonomy& tax, const std::string& species_id) const {
  const auto& r = tax.lineage(species_id);
  if (ids_.contains(species_id)) return 0;
  if (genera_.contains(r.genus)) return 1;
  if (families_.contains(r.family)) return 2;
  if (orders_.contains(r.order)) return 3;
  return 4;
}

int hop_distance(const Taxonomy& tax, const std::string& species_id,
                 const std::unordered_set<std::string>& seen) {
  return SeenCover(tax, seen).hop(tax, species_id);
}

}  // namespace gzsl
