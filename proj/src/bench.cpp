// SPDX-License-Identifier: Apache-2.0
#include "gzsl/bench.hpp"

#include <algorithm>
#include <numeric>

#include "gzsl/rng.hpp"

namespace gzsl {

nlohmann::json BenchConfig::to_json() const {
  return {{"spec", spec.to_json()},
          {"pa", pa.to_json()},
          {"baseline", baseline.to_json()},
          {"ks", ks},
          {"seed", seed}};
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
  BenchConfig c;
  if (j.contains("spec")) {
    c.spec = SyntheticSpec::from_json(j.at("spec"));
  }
  if (j.contains("pa")) {
    c.pa = PaConfig::from_json(j.at("pa"));
  }
  if (j.contains("baseline")) {
    c.baseline = BaselineConfig::from_json(j.at("baseline"));
  }
  if (j.contains("ks")) {
    c.ks = j.at("ks").get<std::vector<int>>();
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::json BenchResult::to_json() const {
  return {{"pa", pa_report.to_json()},
          {"baseline", baseline_report.to_json()},
          {"chance_percent", chance_percent},
          {"spec", spec.to_json()}};
}

PredictionSet rank_predictions(
    const DomainData& test, const std::vector<std::string>& sample_ids,
    const std::vector<std::string>& classes, int max_rank,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& logits_fn) {
  const int ranks = std::min<int>(max_rank, static_cast<int>(classes.size()));
  PredictionSet preds;
  preds.reserve(static_cast<std::size_t>(test.size()));
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const Eigen::VectorXd logits = logits_fn(test.x.row(i).transpose());
    std::vector<int> order(classes.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + ranks, order.end(),
                      [&logits](int a, int b) {
                        if (logits[a] != logits[b]) {
                          return logits[a] > logits[b];
                        }
                        return a < b;  // stable under ties
                      });
    Prediction p;
    p.sample_id = sample_ids.empty()
                      ? "sample-" + std::to_string(i)
                      : sample_ids[static_cast<std::size_t>(i)];
    p.true_class = classes[static_cast<std::size_t>(
        test.labels[static_cast<std::size_t>(i)])];
    for (int r = 0; r < ranks; ++r) {
      p.ranked.push_back(classes[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

PaTrainer train_pa_on_synthetic(const SyntheticData& data, PaConfig pa_cfg) {
  pa_cfg.input_dim = static_cast<int>(data.source_train.x.cols());
  PaDataset dataset;
  dataset.classes = data.classes;
  dataset.seen_classes = data.split.seen;
  dataset.source = data.source_train;
  dataset.target = data.target_train;

  PaTrainer trainer(pa_cfg, dataset.classes, dataset.seen_classes);
  trainer.train(dataset);
  return trainer;
}

BenchResult run_synth_bench(const BenchConfig& config) {
  BenchConfig cfg = config;
  cfg.spec.seed = derive_seed(cfg.seed, "bench-spec");
  const SyntheticData data = generate_synthetic(cfg.spec);

  const int max_rank = *std::max_element(cfg.ks.begin(), cfg.ks.end());

  // Prototype alignment.
  cfg.pa.seed = derive_seed(cfg.seed, "bench-pa");
  PaTrainer pa = train_pa_on_synthetic(data, cfg.pa);
  const PredictionSet pa_preds = rank_predictions(
      data.target_test, data.test_sample_ids, data.classes, max_rank,
      [&pa](const Eigen::VectorXd& x) { return pa.predict_logits(x); });

  // Photos-only supervised baseline over the full label space.
  cfg.baseline.input_dim = static_cast<int>(data.target_train.x.cols());
  cfg.baseline.seed = derive_seed(cfg.seed, "bench-baseline");
  SupervisedBaseline baseline(cfg.baseline,
                              static_cast<int>(data.classes.size()));
  baseline.train(data.target_train);
  const PredictionSet baseline_preds = rank_predictions(
      data.target_test, data.test_sample_ids, data.classes, max_rank,
      [&baseline](const Eigen::VectorXd& x) {
        return baseline.predict_logits(x);
      });

  BenchResult result;
  result.spec = cfg.spec;
  result.chance_percent = 100.0 / static_cast<double>(data.classes.size());
  result.pa_report =
      build_report(pa_preds, data.split, data.taxonomy, cfg.ks);
  result.baseline_report =
      build_report(baseline_preds, data.split, data.taxonomy, cfg.ks);
  return result;
}

}  // namespace gzsl
