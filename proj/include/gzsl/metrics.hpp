// SPDX-License-Identifier: Apache-2.0
//
// GZSL evaluation protocol: per-class top-k accuracy on seen/unseen subsets,
// harmonic mean, hop-set breakdowns and hierarchical-level accuracy.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gzsl/split.hpp"
#include "gzsl/taxonomy.hpp"

namespace gzsl {

struct Prediction {
  std::string sample_id;
  std::string true_class;
  std::vector<std::string> ranked;  // best first, no duplicates
};

using PredictionSet = std::vector<Prediction>;

enum class Averaging { macro, micro };

std::string to_string(Averaging a);
Averaging averaging_from_string(const std::string& s);

// Percentage of samples whose top-k list contains the true class, averaged
// per class (macro, the GZSL convention) or per sample (micro). Every class
// in the subset must have at least one sample (EmptyClassInSubset).
double per_class_topk(const PredictionSet& preds,
                      const std::vector<std::string>& class_subset, int k,
                      Averaging averaging = Averaging::macro);

// H = 2SU/(S+U); 0 when either side is 0. Negative inputs are rejected.
double harmonic_mean(double seen_acc, double unseen_acc);

struct HopBreakdown {
  // hop (1..4) -> accuracy; nullopt when no evaluated class sits in the hop.
  std::map<int, std::optional<double>> accuracy;
  int skipped_classes = 0;  // split classes with no test samples
};

HopBreakdown hop_breakdown(const PredictionSet& preds, const Split& split,
                           int k, Averaging averaging = Averaging::macro);

// Top-1 prediction counts as correct at a level when the predicted species
// shares the ancestor at that level; level 0 is the exact species match.
inline constexpr int kLevelSpecies = 0;
double hierarchical_accuracy(const PredictionSet& preds, const Taxonomy& tax,
                             int level, Averaging averaging = Averaging::macro);

// Mean and standard deviation over runs. Multi-run H is aggregated per run
// (mean of per-run H values), not recomputed from averaged S and U.
struct RunStat {
  double mean = 0.0;
  double stddev = 0.0;
};
RunStat aggregate_runs(const std::vector<double>& values);

// Prediction files: header sample_id,true_class,rank1,...,rankN then one row
// per sample.
void save_predictions(const PredictionSet& preds,
                      const std::filesystem::path& path);
PredictionSet load_predictions(const std::filesystem::path& path);

}  // namespace gzsl
