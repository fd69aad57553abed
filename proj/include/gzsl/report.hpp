// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gzsl/metrics.hpp"
#include "gzsl/split.hpp"
#include "gzsl/taxonomy.hpp"

namespace gzsl {

struct TopkTriple {
  double seen = 0.0;
  double unseen = 0.0;
  double harmonic = 0.0;
};

// Full evaluation readout: S/U/H per k, per-hop accuracy per k, top-1
// accuracy per hierarchy level, and the evaluated sample/class counts.
struct GZSLReport {
  std::map<int, TopkTriple> suh;  // k -> S, U, H
  std::map<int, std::map<int, std::optional<double>>> hop_topk;  // k -> hop -> acc
  std::map<std::string, double> level_top1;  // species/genus/family/order
  std::size_t num_samples = 0;
  std::size_t num_classes = 0;
  std::size_t num_seen_classes = 0;
  std::size_t num_unseen_classes = 0;
  std::size_t skipped_classes = 0;  // split classes without test samples
  Averaging averaging = Averaging::macro;

  nlohmann::json to_json() const;
  // Fixed-width text table for human consumption; derived view only.
  std::string to_table() const;
};

// Evaluates a prediction set against a split and taxonomy. Classes without
// test samples are excluded from the macro averages and counted as skipped.
GZSLReport build_report(const PredictionSet& preds, const Split& split,
                        const Taxonomy& tax, const std::vector<int>& ks,
                        Averaging averaging = Averaging::macro);

}  // namespace gzsl
