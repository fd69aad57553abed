// SPDX-License-Identifier: Apache-2.0
#include "gzsl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"

namespace gzsl {

std::string to_string(Averaging a) {
  return a == Averaging::macro ? "macro" : "micro";
}

Averaging averaging_from_string(const std::string& s) {
  if (s == "macro") return Averaging::macro;
  if (s == "micro") return Averaging::micro;
  throw InvalidConfig("unknown averaging mode: " + s);
}

namespace {

bool hit_topk(const Prediction& p, int k) {
  const auto end = p.ranked.begin() +
                   std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(
                                                   p.ranked.size()));
  return std::find(p.ranked.begin(), end, p.true_class) != end;
}

std::unordered_map<std::string, std::vector<const Prediction*>> group_by_class(
    const PredictionSet& preds) {
  std::unordered_map<std::string, std::vector<const Prediction*>> by_class;
  for (const auto& p : preds) {
    by_class[p.true_class].push_back(&p);
  }
  return by_class;
}

}  // namespace

double per_class_topk(const PredictionSet& preds,
                      const std::vector<std::string>& class_subset, int k,
                      Averaging averaging) {
  if (class_subset.empty()) {
    throw EmptyClassInSubset("class subset is empty");
  }
  if (k < 1) {
    throw InvalidConfig("k must be >= 1");
  }
  const auto by_class = group_by_class(preds);

  double class_acc_sum = 0.0;
  std::size_t total_hits = 0;
  std::size_t total_samples = 0;
  for (const auto& c : class_subset) {
    const auto it = by_class.find(c);
    if (it == by_class.end() || it->second.empty()) {
      throw EmptyClassInSubset("class '" + c + "' has no test samples");
    }
    std::size_t hits = 0;
    for (const auto* p : it->second) {
      if (hit_topk(*p, k)) {
        ++hits;
      }
    }
    class_acc_sum +=
        static_cast<double>(hits) / static_cast<double>(it->second.size());
    total_hits += hits;
    total_samples += it->second.size();
  }
  if (averaging == Averaging::macro) {
    return 100.0 * class_acc_sum / static_cast<double>(class_subset.size());
  }
  return 100.0 * static_cast<double>(total_hits) /
         static_cast<double>(total_samples);
}

double harmonic_mean(double seen_acc, double unseen_acc) {
  if (seen_acc < 0.0 || unseen_acc < 0.0) {
    throw NegativeInput("accuracies must be non-negative");
  }
  const double sum = seen_acc + unseen_acc;
  if (sum <= 0.0) {
    return 0.0;
  }
  return 2.0 * seen_acc * unseen_acc / sum;
}

HopBreakdown hop_breakdown(const PredictionSet& preds, const Split& split,
                           int k, Averaging averaging) {
  const auto by_class = group_by_class(preds);
  HopBreakdown out;
  for (int hop = 1; hop <= 4; ++hop) {
    std::vector<std::string> present;
    for (const auto& c : split.hops[static_cast<std::size_t>(hop - 1)]) {
      if (by_class.contains(c)) {
        present.push_back(c);
      } else {
        ++out.skipped_classes;
      }
    }
    if (present.empty()) {
      out.accuracy[hop] = std::nullopt;
    } else {
      out.accuracy[hop] = per_class_topk(preds, present, k, averaging);
    }
  }
  return out;
}

double hierarchical_accuracy(const PredictionSet& preds, const Taxonomy& tax,
                             int level, Averaging averaging) {
  if (level < kLevelSpecies || level > kLevelOrder) {
    throw InvalidConfig("hierarchy level must lie in [0, 3]");
  }
  if (preds.empty()) {
    throw EmptyClassInSubset("no predictions to evaluate");
  }
  const auto correct_at_level = [&](const Prediction& p) {
    if (p.ranked.empty()) {
      return false;
    }
    const std::string& top1 = p.ranked.front();
    if (level == kLevelSpecies) {
      // Exact-match check still validates both ids against the taxonomy.
      tax.lineage(top1);
      tax.lineage(p.true_class);
      return top1 == p.true_class;
    }
    return tax.ancestor_at_level(top1, level) ==
           tax.ancestor_at_level(p.true_class, level);
  };

  const auto by_class = group_by_class(preds);
  double class_acc_sum = 0.0;
  std::size_t hits = 0;
  for (const auto& [class_id, samples] : by_class) {
    std::size_t class_hits = 0;
    for (const auto* p : samples) {
      if (correct_at_level(*p)) {
        ++class_hits;
      }
    }
    class_acc_sum +=
        static_cast<double>(class_hits) / static_cast<double>(samples.size());
    hits += class_hits;
  }
  if (averaging == Averaging::macro) {
    return 100.0 * class_acc_sum / static_cast<double>(by_class.size());
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

RunStat aggregate_runs(const std::vector<double>& values) {
  RunStat s;
  if (values.empty()) {
    return s;
  }
  double sum = 0.0;
  for (const double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (const double v : values) {
    sq += (v - s.mean) * (v - s.mean);
  }
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

void save_predictions(const PredictionSet& preds,
                      const std::filesystem::path& path) {
  if (preds.empty()) {
    throw EmptyClassInSubset("no predictions to save");
  }
  std::size_t max_ranks = 0;
  for (const auto& p : preds) {
    max_ranks = std::max(max_ranks, p.ranked.size());
  }
  std::ostringstream out;
  out << "sample_id,true_class";
  for (std::size_t r = 1; r <= max_ranks; ++r) {
    out << ",rank" << r;
  }
  out << '\n';
  for (const auto& p : preds) {
    out << p.sample_id << ',' << p.true_class;
    for (const auto& c : p.ranked) {
      out << ',' << c;
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidRecord("empty prediction file: " + path.string());
  }
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "sample_id" ||
      header[1] != "true_class") {
    throw InvalidRecord("prediction file header must start with "
                        "sample_id,true_class,rank1");
  }
  PredictionSet preds;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < 3) {
      throw InvalidRecord("prediction row has no ranks: " + line);
    }
    Prediction p;
    p.sample_id = fields[0];
    p.true_class = fields[1];
    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      if (fields[i].empty()) {
        continue;
      }
      if (!seen_ids.insert(fields[i]).second) {
        throw InvalidRecord("duplicate class in ranked list: " + fields[i]);
      }
      p.ranked.push_back(fields[i]);
    }
    preds.push_back(std::move(p));
  }
  if (preds.empty()) {
    throw InvalidRecord("prediction file has no rows: " + path.string());
  }
  return preds;
}

}  // namespace gzsl
