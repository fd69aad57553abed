// SPDX-License-Identifier: Apache-2.0
//
// End-to-end synthetic benchmark: prototype alignment against a photos-only
// supervised baseline on the generated two-domain dataset.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "gzsl/baseline.hpp"
#include "gzsl/pa_trainer.hpp"
#include "gzsl/report.hpp"
#include "gzsl/synthetic.hpp"

namespace gzsl {

struct BenchConfig {
  // Desk-scale training settings; the slower schedule meant for large
  // pretrained backbones would be badly undertrained here.
  BenchConfig() {
    pa.lr = 1e-3;
    pa.backbone_lr_scale = 1.0;
    pa.iterations = 500;
  }

  SyntheticSpec spec;
  PaConfig pa;              // input_dim/seed resolved by the runner
  BaselineConfig baseline;  // likewise
  std::vector<int> ks = {1, 5, 10};
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static BenchConfig from_json(const nlohmann::json& j);
};

struct BenchResult {
  GZSLReport pa_report;
  GZSLReport baseline_report;
  double chance_percent = 0.0;
  SyntheticSpec spec;

  nlohmann::json to_json() const;
};

// Ranked predictions from a logit function over the global class order.
PredictionSet rank_predictions(
    const DomainData& test, const std::vector<std::string>& sample_ids,
    const std::vector<std::string>& classes, int max_rank,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& logits_fn);

// Trains PA and the baseline on the synthetic dataset, evaluates both on the
// held-out photos. Fully deterministic for a fixed config.
BenchResult run_synth_bench(const BenchConfig& config);

// Convenience: trains PA on an already generated dataset and returns the
// trained model (used by the benchmark and by ablation sweeps).
PaTrainer train_pa_on_synthetic(const SyntheticData& data, PaConfig pa_cfg);

}  // namespace gzsl
