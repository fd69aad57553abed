// SPDX-License-Identifier: Apache-2.0
#include "gzsl/split.hpp"

#include <algorithm>
#include <unordered_set>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/rng.hpp"

namespace gzsl {

std::size_t Split::total_classes() const {
  std::size_t n = seen.size();
  for (const auto& h : hops) {
    n += h.size();
  }
  return n;
}

std::vector<std::string> Split::unseen() const {
  std::vector<std::string> out;
  for (const auto& h : hops) {
    out.insert(out.end(), h.begin(), h.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Split::is_seen(const std::string& id) const {
  return std::binary_search(seen.begin(), seen.end(), id);
}

std::optional<int> Split::hop_of(const std::string& id) const {
  if (is_seen(id)) {
    return 0;
  }
  for (int i = 0; i < 4; ++i) {
    if (std::binary_search(hops[i].begin(), hops[i].end(), id)) {
      return i + 1;
    }
  }
  return std::nullopt;
}

void Split::validate(const Taxonomy& tax) const {
  std::unordered_set<std::string> all;
  auto add_set = [&all](const std::vector<std::string>& ids, const char* name) {
    for (const auto& id : ids) {
      if (!all.insert(id).second) {
        throw InvalidRecord("split sets are not disjoint: '" + id +
                            "' appears twice (" + name + ")");
      }
    }
  };
  add_set(seen, "seen");
  for (int i = 0; i < 4; ++i) {
    add_set(hops[i], "hop set");
  }
  if (all.size() != tax.size()) {
    throw InvalidRecord("split does not cover the class set: " +
                        std::to_string(all.size()) + " of " +
                        std::to_string(tax.size()) + " classes");
  }
  for (const auto& id : all) {
    if (!tax.contains(id)) {
      throw UnknownSpecies("split references unknown species '" + id + "'");
    }
  }
  const std::unordered_set<std::string> seen_set(seen.begin(), seen.end());
  const SeenCover cover(tax, seen_set);
  for (int i = 0; i < 4; ++i) {
    for (const auto& id : hops[i]) {
      const int h = cover.hop(tax, id);
      if (h != i + 1) {
        throw InvalidRecord("species '" + id + "' sits in hop set " +
                            std::to_string(i + 1) + " but has hop distance " +
                            std::to_string(h));
      }
    }
  }
}

nlohmann::json Split::to_json() const {
  nlohmann::json hops_json = nlohmann::json::object();
  for (int i = 0; i < 4; ++i) {
    hops_json[std::to_string(i + 1)] = hops[i];
  }
  return {{"seed", seed}, {"seen", seen}, {"hops", hops_json}};
}

Split Split::from_json(const nlohmann::json& j) {
  Split s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.seen = j.at("seen").get<std::vector<std::string>>();
  std::sort(s.seen.begin(), s.seen.end());
  for (int i = 0; i < 4; ++i) {
    const auto key = std::to_string(i + 1);
    if (j.at("hops").contains(key)) {
      s.hops[i] = j.at("hops").at(key).get<std::vector<std::string>>();
      std::sort(s.hops[i].begin(), s.hops[i].end());
    }
  }
  const auto total = s.total_classes();
  s.seen_fraction =
      total == 0 ? 0.0
                 : static_cast<double>(s.seen.size()) / static_cast<double>(total);
  return s;
}

void Split::save(const std::filesystem::path& path) const {
  write_json_file(path, to_json());
}

Split Split::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

Split make_split(const Taxonomy& tax, std::size_t seen_count,
                 std::uint64_t seed) {
  const std::size_t n = tax.size();
  if (seen_count == 0 || seen_count >= n) {
    throw InvalidSeenCount("seen_count must be in (0, " + std::to_string(n) +
                           "), got " + std::to_string(seen_count));
  }

  std::vector<std::string> ids = tax.species_ids();  // sorted
  Rng rng(seed);
  // Partial Fisher-Yates: the first seen_count slots become the seen sample.
  for (std::size_t i = 0; i < seen_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
  }

  Split split;
  split.seed = seed;
  split.seen.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(seen_count));
  std::sort(split.seen.begin(), split.seen.end());
  split.seen_fraction = static_cast<double>(seen_count) / static_cast<double>(n);

  const std::unordered_set<std::string> seen_set(split.seen.begin(),
                                                 split.seen.end());
  const SeenCover cover(tax, seen_set);
  for (auto it = ids.begin() + static_cast<std::ptrdiff_t>(seen_count);
       it != ids.end(); ++it) {
    const int h = cover.hop(tax, *it);
    split.hops[h - 1].push_back(*it);
  }
  for (auto& hop : split.hops) {
    std::sort(hop.begin(), hop.end());
  }
  return split;
}

}  // namespace gzsl
