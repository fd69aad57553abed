// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/metrics.hpp"
#include "gzsl/report.hpp"
#include "gzsl/split.hpp"
#include "gzsl/taxonomy.hpp"
#include "test_util.hpp"

using namespace gzsl;

namespace {

Prediction make_pred(const std::string& id, const std::string& truth,
                     std::vector<std::string> ranked) {
  return Prediction{id, truth, std::move(ranked)};
}

}  // namespace

TEST_CASE("per_class_topk basics") {
  PredictionSet preds = {
      make_pred("1", "a", {"a", "b"}),
      make_pred("2", "a", {"a", "b"}),
      make_pred("3", "b", {"a", "b"}),
  };
  // All predictions correct at top-1.
  PredictionSet perfect = {make_pred("1", "a", {"a"}),
                           make_pred("2", "b", {"b"})};
  CHECK(per_class_topk(perfect, {"a", "b"}, 1) == doctest::Approx(100.0));

  // Macro average ignores sample counts: class a is 100%, class b is 0%.
  CHECK(per_class_topk(preds, {"a", "b"}, 1) == doctest::Approx(50.0));
  // Micro average weighs samples: 2 of 3 correct.
  CHECK(per_class_topk(preds, {"a", "b"}, 1, Averaging::micro) ==
        doctest::Approx(100.0 * 2.0 / 3.0));
  // b is found at rank 2.
  CHECK(per_class_topk(preds, {"a", "b"}, 2) == doctest::Approx(100.0));

  CHECK_THROWS_AS(per_class_topk(preds, {}, 1), EmptyClassInSubset);
  CHECK_THROWS_AS(per_class_topk(preds, {"zz"}, 1), EmptyClassInSubset);
  CHECK_THROWS_AS(per_class_topk(preds, {"a"}, 0), InvalidConfig);
}

TEST_CASE("per_class_topk agrees with the brute-force recount") {
  Rng rng(1);
  std::vector<std::string> classes;
  for (int i = 0; i < 12; ++i) {
    classes.push_back("c" + std::to_string(i));
  }
  const PredictionSet preds =
      testutil::random_predictions(rng, classes, 1000, 10);
  for (const int k : {1, 3, 5, 10}) {
    CHECK(per_class_topk(preds, classes, k) ==
          doctest::Approx(testutil::topk_oracle(preds, classes, k, true))
              .epsilon(1e-12));
    CHECK(per_class_topk(preds, classes, k, Averaging::micro) ==
          doctest::Approx(testutil::topk_oracle(preds, classes, k, false))
              .epsilon(1e-12));
  }
}

TEST_CASE("top-k accuracy is non-decreasing in k") {
  Rng rng(2);
  std::vector<std::string> classes;
  for (int i = 0; i < 8; ++i) {
    classes.push_back("c" + std::to_string(i));
  }
  const PredictionSet preds =
      testutil::random_predictions(rng, classes, 300, 8);
  double prev = 0.0;
  for (int k = 1; k <= 8; ++k) {
    const double acc = per_class_topk(preds, classes, k);
    CHECK(acc >= prev - 1e-12);
    prev = acc;
  }
}

TEST_CASE("harmonic mean") {
  // Reported working point: S=20.9, U=12.2 -> H=15.4.
  CHECK(harmonic_mean(20.9, 12.2) == doctest::Approx(15.4).epsilon(0.05 / 15.4));
  CHECK(harmonic_mean(37.5, 37.5) == doctest::Approx(37.5));
  CHECK(harmonic_mean(55.0, 0.0) == 0.0);
  CHECK(harmonic_mean(0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(harmonic_mean(-1.0, 5.0), NegativeInput);
}

TEST_CASE("harmonic mean is bounded by min, max and arithmetic mean") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = rng.uniform() * 100.0;
    const double u = rng.uniform() * 100.0;
    const double h = harmonic_mean(s, u);
    CHECK(h >= -1e-12);
    CHECK(h <= std::max(s, u) + 1e-12);
    CHECK(h <= (s + u) / 2.0 + 1e-12);
    if (s > 0.0 && u > 0.0) {
      CHECK(h >= std::min(s, u) - 1e-12);
    }
  }
}

TEST_CASE("hop breakdown on a hand-built split") {
  Taxonomy tax = Taxonomy::from_records({{"a", "G1", "F1", "O1"},
                                         {"b", "G1", "F1", "O1"},
                                         {"c", "G2", "F1", "O1"},
                                         {"d", "G3", "F2", "O1"},
                                         {"e", "G4", "F3", "O2"}});
  const Split split = [&] {
    Split s;
    s.seen = {"a"};
    s.hops[0] = {"b"};
    s.hops[1] = {"c"};
    s.hops[2] = {"d"};
    s.hops[3] = {"e"};
    s.seed = 0;
    s.seen_fraction = 0.2;
    s.validate(tax);
    return s;
  }();

  // Perfect on the 1-hop class, wrong elsewhere.
  PredictionSet preds = {
      make_pred("1", "b", {"b", "a"}), make_pred("2", "c", {"a", "b"}),
      make_pred("3", "d", {"a", "b"}), make_pred("4", "e", {"a", "b"})};
  const HopBreakdown hb = hop_breakdown(preds, split, 1);
  CHECK(*hb.accuracy.at(1) == doctest::Approx(100.0));
  CHECK(*hb.accuracy.at(2) == doctest::Approx(0.0));
  CHECK(*hb.accuracy.at(3) == doctest::Approx(0.0));
  CHECK(*hb.accuracy.at(4) == doctest::Approx(0.0));
  CHECK(hb.skipped_classes == 0);

  // Dropping the 4-hop class from the predictions marks it skipped.
  preds.pop_back();
  const HopBreakdown partial = hop_breakdown(preds, split, 1);
  CHECK_FALSE(partial.accuracy.at(4).has_value());
  CHECK(partial.skipped_classes == 1);
}

TEST_CASE("unseen accuracy recombines from hop accuracies by class counts") {
  Rng rng(4);
  const Taxonomy tax = testutil::random_taxonomy(rng, 40);
  const Split split = make_split(tax, 12, 99);

  const PredictionSet preds =
      testutil::random_predictions(rng, tax.species_ids(), 600, 6, 2);

  for (const int k : {1, 3}) {
    const HopBreakdown hb = hop_breakdown(preds, split, k);
    double weighted = 0.0;
    std::size_t classes = 0;
    for (int hop = 1; hop <= 4; ++hop) {
      const auto& hop_classes = split.hops[static_cast<std::size_t>(hop - 1)];
      if (hop_classes.empty()) {
        CHECK_FALSE(hb.accuracy.at(hop).has_value());
        continue;
      }
      weighted += *hb.accuracy.at(hop) * static_cast<double>(hop_classes.size());
      classes += hop_classes.size();

      // Brute-force oracle per hop set.
      CHECK(*hb.accuracy.at(hop) ==
            doctest::Approx(testutil::topk_oracle(preds, hop_classes, k, true))
                .epsilon(1e-12));
    }
    const double overall = per_class_topk(preds, split.unseen(), k);
    CHECK(overall ==
          doctest::Approx(weighted / static_cast<double>(classes)).epsilon(1e-12));
  }
}

TEST_CASE("hierarchical accuracy by example") {
  const Taxonomy tax = Taxonomy::from_records({{"a", "G1", "F1", "O1"},
                                               {"b", "G1", "F1", "O1"},
                                               {"c", "G2", "F1", "O1"},
                                               {"e", "G4", "F3", "O2"}});
  // Exact species match: correct at every level.
  PredictionSet exact = {make_pred("1", "a", {"a"})};
  for (int level = 0; level <= 3; ++level) {
    CHECK(hierarchical_accuracy(exact, tax, level) == doctest::Approx(100.0));
  }
  // Same-genus sibling: wrong species, correct genus/family/order.
  PredictionSet sibling = {make_pred("1", "a", {"b"})};
  CHECK(hierarchical_accuracy(sibling, tax, kLevelSpecies) == 0.0);
  CHECK(hierarchical_accuracy(sibling, tax, kLevelGenus) == 100.0);
  CHECK(hierarchical_accuracy(sibling, tax, kLevelFamily) == 100.0);
  CHECK(hierarchical_accuracy(sibling, tax, kLevelOrder) == 100.0);

  // Same family, different genus.
  PredictionSet cousin = {make_pred("1", "a", {"c"})};
  CHECK(hierarchical_accuracy(cousin, tax, kLevelGenus) == 0.0);
  CHECK(hierarchical_accuracy(cousin, tax, kLevelFamily) == 100.0);

  PredictionSet unknown = {make_pred("1", "a", {"zz"})};
  CHECK_THROWS_AS(hierarchical_accuracy(unknown, tax, kLevelGenus),
                  UnknownSpecies);
}

TEST_CASE("hierarchical accuracy is monotone from species to order") {
  Rng rng(5);
  const Taxonomy tax = testutil::random_taxonomy(rng, 30);
  for (int trial = 0; trial < 10; ++trial) {
    const PredictionSet preds =
        testutil::random_predictions(rng, tax.species_ids(), 150, 3);
    double prev = -1.0;
    for (int level = 0; level <= 3; ++level) {
      const double acc = hierarchical_accuracy(preds, tax, level);
      CHECK(acc >= prev - 1e-12);
      prev = acc;
    }
  }
}

TEST_CASE("multi-run aggregation averages per-run values") {
  const RunStat h = aggregate_runs({15.0, 16.0, 14.0});
  CHECK(h.mean == doctest::Approx(15.0));
  CHECK(h.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)));
  const RunStat empty = aggregate_runs({});
  CHECK(empty.mean == 0.0);
}

TEST_CASE("prediction files round-trip") {
  Rng rng(6);
  std::vector<std::string> classes = {"x", "y", "z"};
  const PredictionSet preds =
      testutil::random_predictions(rng, classes, 25, 3);
  const auto path =
      std::filesystem::temp_directory_path() / "gzsl_preds_test.csv";
  save_predictions(preds, path);
  const PredictionSet loaded = load_predictions(path);
  REQUIRE(loaded.size() == preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(loaded[i].sample_id == preds[i].sample_id);
    CHECK(loaded[i].true_class == preds[i].true_class);
    CHECK(loaded[i].ranked == preds[i].ranked);
  }
  std::filesystem::remove(path);
}

TEST_CASE("prediction loader rejects duplicate ranks") {
  const auto path =
      std::filesystem::temp_directory_path() / "gzsl_preds_bad.csv";
  write_text_file(path, "sample_id,true_class,rank1,rank2\ns1,a,b,b\n");
  CHECK_THROWS_AS(load_predictions(path), InvalidRecord);
  std::filesystem::remove(path);
}

TEST_CASE("build_report produces a consistent readout") {
  Rng rng(7);
  const Taxonomy tax = testutil::random_taxonomy(rng, 25);
  const Split split = make_split(tax, 10, 1);
  const PredictionSet preds =
      testutil::random_predictions(rng, tax.species_ids(), 400, 10, 2);

  const GZSLReport report = build_report(preds, split, tax, {1, 5, 10});
  CHECK(report.num_samples == preds.size());
  CHECK(report.num_classes == tax.size());
  CHECK(report.skipped_classes == 0);

  for (const int k : {1, 5, 10}) {
    const TopkTriple& t = report.suh.at(k);
    CHECK(t.seen >= 0.0);
    CHECK(t.seen <= 100.0);
    CHECK(t.unseen >= 0.0);
    CHECK(t.unseen <= 100.0);
    // H is recomputable from S and U.
    CHECK(t.harmonic == doctest::Approx(harmonic_mean(t.seen, t.unseen)));
    // Hop keys 1..4 are always present.
    for (int hop = 1; hop <= 4; ++hop) {
      CHECK(report.hop_topk.at(k).contains(hop));
    }
  }
  for (const auto* level : {"species", "genus", "family", "order"}) {
    CHECK(report.level_top1.contains(level));
  }

  const auto j = report.to_json();
  CHECK(j.at("topk").contains("1"));
  CHECK(j.at("averaging") == "macro");
  CHECK_FALSE(report.to_table().empty());
}

TEST_CASE("report counts classes without samples as skipped") {
  Rng rng(8);
  const Taxonomy tax = testutil::random_taxonomy(rng, 20);
  const Split split = make_split(tax, 8, 2);

  // Only half of the classes receive predictions.
  auto ids = tax.species_ids();
  const std::vector<std::string> half(ids.begin(), ids.begin() + 10);
  const PredictionSet preds = testutil::random_predictions(rng, half, 100, 5);

  const GZSLReport report = build_report(preds, split, tax, {1});
  CHECK(report.skipped_classes == 10);
  CHECK(report.num_classes == 10);
}
