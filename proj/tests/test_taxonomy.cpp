// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <unordered_set>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/split.hpp"
#include "gzsl/taxonomy.hpp"
#include "test_util.hpp"

using namespace gzsl;

namespace {
Taxonomy five_species_tree() {
  return Taxonomy::from_records({{"a", "G1", "F1", "O1"},
                                 {"b", "G1", "F1", "O1"},
                                 {"c", "G2", "F1", "O1"},
                                 {"d", "G3", "F2", "O1"},
                                 {"e", "G4", "F3", "O2"}});
}
}  // namespace

TEST_CASE("single-row taxonomy") {
  const Taxonomy tax = Taxonomy::from_records({{"a", "G1", "F1", "O1"}});
  CHECK(tax.size() == 1);
  CHECK(tax.genus_count() == 1);
  CHECK(tax.family_count() == 1);
  CHECK(tax.order_count() == 1);
  CHECK(tax.contains("a"));
  CHECK_FALSE(tax.contains("b"));
}

TEST_CASE("genus under two families is rejected") {
  CHECK_THROWS_AS(Taxonomy::from_records(
                      {{"a", "G1", "F1", "O1"}, {"b", "G1", "F2", "O1"}}),
                  InconsistentLineage);
  CHECK_THROWS_AS(Taxonomy::from_records(
                      {{"a", "G1", "F1", "O1"}, {"b", "G2", "F1", "O2"}}),
                  InconsistentLineage);
}

TEST_CASE("duplicate species handling") {
  // Identical duplicate rows collapse.
  const Taxonomy tax = Taxonomy::from_records(
      {{"a", "G1", "F1", "O1"}, {"a", "G1", "F1", "O1"}});
  CHECK(tax.size() == 1);
  // Conflicting lineages are a hard error.
  CHECK_THROWS_AS(Taxonomy::from_records(
                      {{"a", "G1", "F1", "O1"}, {"a", "G2", "F1", "O1"}}),
                  DuplicateSpeciesConflict);
}

TEST_CASE("csv parsing validates columns and fields") {
  CHECK_THROWS_AS(Taxonomy::parse_csv("species_id,genus,family\na,G1,F1"),
                  MissingColumn);
  CHECK_THROWS_AS(
      Taxonomy::parse_csv("species_id,genus,family,order\na,,F1,O1"),
      InvalidRecord);
  // Whitespace around fields is trimmed; shuffled column order is accepted.
  const Taxonomy tax = Taxonomy::parse_csv(
      "order,species_id,genus,family\nO1 , a ,G1, F1\n");
  CHECK(tax.lineage("a").family == "F1");
}

TEST_CASE("round-trip of a 200-species random taxonomy") {
  Rng rng(41);
  const Taxonomy tax = testutil::random_taxonomy(rng, 200);
  const std::string csv = tax.to_csv();
  const Taxonomy reloaded = Taxonomy::parse_csv(csv);
  CHECK(reloaded.to_csv() == csv);
  CHECK(reloaded.size() == tax.size());
}

TEST_CASE("hop distances on the five-species tree") {
  const Taxonomy tax = five_species_tree();
  const std::unordered_set<std::string> seen = {"a"};
  CHECK(hop_distance(tax, "a", seen) == 0);
  CHECK(hop_distance(tax, "b", seen) == 1);
  CHECK(hop_distance(tax, "c", seen) == 2);
  CHECK(hop_distance(tax, "d", seen) == 3);
  CHECK(hop_distance(tax, "e", seen) == 4);

  const std::unordered_set<std::string> all = {"a", "b", "c", "d", "e"};
  for (const auto& id : all) {
    CHECK(hop_distance(tax, id, all) == 0);
  }
  CHECK_THROWS_AS(hop_distance(tax, "zz", seen), UnknownSpecies);
  CHECK_THROWS_AS(hop_distance(tax, "a", {"zz"}), UnknownSpecies);
}

TEST_CASE("ancestor_at_level") {
  const Taxonomy tax = five_species_tree();
  CHECK(tax.ancestor_at_level("a", kLevelGenus) == "G1");
  CHECK(tax.ancestor_at_level("a", kLevelFamily) == "F1");
  CHECK(tax.ancestor_at_level("a", kLevelOrder) == "O1");
  CHECK(tax.ancestor_at_level("a", kLevelGenus) ==
        tax.ancestor_at_level("b", kLevelGenus));
  CHECK_THROWS_AS(tax.ancestor_at_level("zz", 1), UnknownSpecies);
  CHECK_THROWS_AS(tax.ancestor_at_level("a", 4), InvalidConfig);

  // Lineage agreement for every species of a generated taxonomy.
  Rng rng(7);
  const Taxonomy big = testutil::random_taxonomy(rng, 120);
  for (const auto& r : big.species()) {
    CHECK(big.ancestor_at_level(r.species_id, kLevelGenus) == r.genus);
    CHECK(big.ancestor_at_level(r.species_id, kLevelFamily) == r.family);
    CHECK(big.ancestor_at_level(r.species_id, kLevelOrder) == r.order);
  }
}

TEST_CASE("make_split rejects bad seen counts") {
  const Taxonomy tax = five_species_tree();
  CHECK_THROWS_AS(make_split(tax, 0, 1), InvalidSeenCount);
  CHECK_THROWS_AS(make_split(tax, 5, 1), InvalidSeenCount);
  CHECK_THROWS_AS(make_split(tax, 50, 1), InvalidSeenCount);
}

TEST_CASE("make_split determinism and byte-stable export") {
  Rng rng(99);
  const Taxonomy tax = testutil::random_taxonomy(rng, 60);
  const Split a = make_split(tax, 25, 1234);
  const Split b = make_split(tax, 25, 1234);
  CHECK(a.to_json().dump() == b.to_json().dump());
  const Split c = make_split(tax, 25, 1235);
  CHECK(a.to_json().dump() != c.to_json().dump());
}

TEST_CASE("N-1 seen classes leaves exactly one unseen class") {
  Rng rng(5);
  const Taxonomy tax = testutil::random_taxonomy(rng, 30);
  const Split split = make_split(tax, 29, 7);
  CHECK(split.seen.size() == 29);
  std::size_t unseen = 0;
  int populated_hops = 0;
  for (const auto& hop : split.hops) {
    unseen += hop.size();
    if (!hop.empty()) {
      ++populated_hops;
    }
  }
  CHECK(unseen == 1);
  CHECK(populated_hops == 1);
}

TEST_CASE("split invariants and hop assignments match the brute-force oracle") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(1000 + trial);
    const int n = 20 + static_cast<int>(rng.below(181));  // up to 200 species
    const Taxonomy tax = testutil::random_taxonomy(rng, n);
    const auto seen_count =
        1 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const Split split = make_split(tax, seen_count, 555 + trial);

    split.validate(tax);  // disjoint, exhaustive, hop-consistent
    CHECK(split.total_classes() == tax.size());

    for (int hop = 1; hop <= 4; ++hop) {
      for (const auto& id : split.hops[static_cast<std::size_t>(hop - 1)]) {
        CHECK(testutil::hop_oracle(tax, id, split.seen) == hop);
      }
    }
    for (const auto& id : split.seen) {
      CHECK(testutil::hop_oracle(tax, id, split.seen) == 0);
    }
  }
}

TEST_CASE("hop distance is monotone under seen-set growth") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    Rng rng(42 + trial);
    const Taxonomy tax = testutil::random_taxonomy(rng, 50);
    auto ids = tax.species_ids();
    rng.shuffle(ids);

    std::unordered_set<std::string> small(ids.begin(), ids.begin() + 5);
    std::unordered_set<std::string> large(ids.begin(), ids.begin() + 20);
    const SeenCover small_cover(tax, small);
    const SeenCover large_cover(tax, large);
    for (const auto& r : tax.species()) {
      CHECK(large_cover.hop(tax, r.species_id) <=
            small_cover.hop(tax, r.species_id));
    }
  }
}

TEST_CASE("split json round-trip") {
  Rng rng(11);
  const Taxonomy tax = testutil::random_taxonomy(rng, 40);
  const Split split = make_split(tax, 15, 2024);

  const auto path = std::filesystem::temp_directory_path() /
                    "gzsl_test_split_roundtrip.json";
  split.save(path);
  const Split reloaded = Split::load(path);
  CHECK(reloaded.to_json().dump() == split.to_json().dump());
  CHECK(reloaded.seed == split.seed);
  CHECK(reloaded.seen_fraction == doctest::Approx(split.seen_fraction));
  reloaded.validate(tax);
  std::filesystem::remove(path);
}

TEST_CASE("hop_of covers every class exactly once") {
  Rng rng(13);
  const Taxonomy tax = testutil::random_taxonomy(rng, 35);
  const Split split = make_split(tax, 10, 3);
  std::map<int, int> counts;
  for (const auto& r : tax.species()) {
    const auto hop = split.hop_of(r.species_id);
    REQUIRE(hop.has_value());
    ++counts[*hop];
  }
  CHECK(counts[0] == 10);
  CHECK(split.hop_of("missing") == std::nullopt);
}
