// SPDX-License-Identifier: Apache-2.0
#include "gzsl/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "gzsl/errors.hpp"

namespace gzsl {

nlohmann::json GZSLReport::to_json() const {
  nlohmann::json suh_json = nlohmann::json::object();
  for (const auto& [k, triple] : suh) {
    suh_json[std::to_string(k)] = {{"S", triple.seen},
                                   {"U", triple.unseen},
                                   {"H", triple.harmonic}};
  }
  nlohmann::json hops_json = nlohmann::json::object();
  for (const auto& [k, hops] : hop_topk) {
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [hop, acc] : hops) {
      if (acc.has_value()) {
        h[std::to_string(hop)] = *acc;
      } else {
        h[std::to_string(hop)] = nullptr;
      }
    }
    hops_json[std::to_string(k)] = h;
  }
  return {{"topk", suh_json},
          {"hop_topk", hops_json},
          {"level_top1", level_top1},
          {"num_samples", num_samples},
          {"num_classes", num_classes},
          {"num_seen_classes", num_seen_classes},
          {"num_unseen_classes", num_unseen_classes},
          {"skipped_classes", skipped_classes},
          {"averaging", to_string(averaging)}};
}

std::string GZSLReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "k     S      U      H\n";
  for (const auto& [k, t] : suh) {
    out << std::left << std::setw(5) << k << ' ';
    out << std::setw(6) << t.seen << ' ' << std::setw(6) << t.unseen << ' '
        << std::setw(6) << t.harmonic << '\n';
  }
  out << "hop accuracy (top-1..):\n";
  for (const auto& [k, hops] : hop_topk) {
    out << "  top-" << k << ':';
    for (const auto& [hop, acc] : hops) {
      out << ' ' << hop << "-hop=";
      if (acc.has_value()) {
        out << *acc;
      } else {
        out << "n/a";
      }
    }
    out << '\n';
  }
  out << "level top-1:";
  for (const auto& [level, acc] : level_top1) {
    out << ' ' << level << '=' << acc;
  }
  out << '\n';
  return out.str();
}

GZSLReport build_report(const PredictionSet& preds, const Split& split,
                        const Taxonomy& tax, const std::vector<int>& ks,
                        Averaging averaging) {
  if (preds.empty()) {
    throw EmptyClassInSubset("no predictions to evaluate");
  }
  if (ks.empty()) {
    throw InvalidConfig("at least one k is required");
  }

  std::unordered_set<std::string> present;
  for (const auto& p : preds) {
    present.insert(p.true_class);
  }

  GZSLReport report;
  report.averaging = averaging;
  report.num_samples = preds.size();

  std::vector<std::string> seen_present;
  for (const auto& c : split.seen) {
    if (present.contains(c)) {
      seen_present.push_back(c);
    } else {
      ++report.skipped_classes;
    }
  }
  std::vector<std::string> unseen_present;
  for (const auto& c : split.unseen()) {
    if (present.contains(c)) {
      unseen_present.push_back(c);
    } else {
      ++report.skipped_classes;
    }
  }
  report.num_seen_classes = seen_present.size();
  report.num_unseen_classes = unseen_present.size();
  report.num_classes = seen_present.size() + unseen_present.size();

  for (const int k : ks) {
    TopkTriple triple;
    triple.seen = seen_present.empty()
                      ? 0.0
                      : per_class_topk(preds, seen_present, k, averaging);
    triple.unseen = unseen_present.empty()
                        ? 0.0
                        : per_class_topk(preds, unseen_present, k, averaging);
    triple.harmonic = harmonic_mean(triple.seen, triple.unseen);
    report.suh[k] = triple;
    report.hop_topk[k] = hop_breakdown(preds, split, k, averaging).accuracy;
  }

  const std::map<std::string, int> levels = {{"species", kLevelSpecies},
                                             {"genus", kLevelGenus},
                                             {"family", kLevelFamily},
                                             {"order", kLevelOrder}};
  for (const auto& [name, level] : levels) {
    report.level_top1[name] = hierarchical_accuracy(preds, tax, level, averaging);
  }
  return report;
}

}  // namespace gzsl
