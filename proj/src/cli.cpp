// SPDX-License-Identifier: Apache-2.0
#include "gzsl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include "gzsl/bench.hpp"
#include "gzsl/ce_trainer.hpp"
#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/manifest.hpp"
#include "gzsl/metrics.hpp"
#include "gzsl/pa_trainer.hpp"
#include "gzsl/report.hpp"
#include "gzsl/rng.hpp"
#include "gzsl/split.hpp"
#include "gzsl/taxonomy.hpp"
#include "gzsl/version.hpp"

namespace gzsl::cli {

namespace {

nlohmann::json base_config(const std::string& command, std::uint64_t seed) {
  return {{"command", command}, {"tool_version", kVersion}, {"seed", seed}};
}

// Global class order used by training and prediction: sorted union of the
// split's class sets.
std::vector<std::string> split_classes(const Split& split) {
  std::vector<std::string> classes = split.seen;
  for (const auto& hop : split.hops) {
    classes.insert(classes.end(), hop.begin(), hop.end());
  }
  std::sort(classes.begin(), classes.end());
  return classes;
}

}  // namespace

RunDir::RunDir(std::filesystem::path out) : out_(std::move(out)) {
  std::filesystem::create_directories(out_);
  // Truncate any previous log so reruns produce identical bytes.
  write_text_file(file("log.jsonl"), "");
}

std::filesystem::path RunDir::file(const std::string& name) const {
  return out_ / name;
}

void RunDir::write_config(const nlohmann::json& config) const {
  write_json_file(file("config.json"), config);
}

void RunDir::log(nlohmann::json event) {
  event["seq"] = sequence_++;
  std::ofstream out(file("log.jsonl"), std::ios::app);
  if (!out) {
    throw IOFailure("cannot append to run log");
  }
  out << event.dump() << '\n';
}

void cmd_split(const SplitArgs& args) {
  RunDir run(args.out);
  const Taxonomy tax = Taxonomy::load_csv(args.taxonomy);
  const std::uint64_t split_seed = derive_seed(args.seed, "split");
  const Split split = make_split(tax, args.seen_count, split_seed);

  nlohmann::json config = base_config("split", args.seed);
  config["taxonomy"] = args.taxonomy.string();
  config["seen_count"] = args.seen_count;
  config["split_seed"] = split_seed;
  if (args.manifest) {
    config["manifest"] = args.manifest->string();
  }
  run.write_config(config);

  split.save(run.file("split.json"));
  run.log({{"event", "wrote"}, {"file", "split.json"}});

  // Per-set class counts, and sample counts when a manifest is available.
  nlohmann::json stats;
  nlohmann::json classes;
  classes["seen"] = split.seen.size();
  std::size_t unseen_total = 0;
  for (int i = 0; i < 4; ++i) {
    classes["hop" + std::to_string(i + 1)] =
        split.hops[static_cast<std::size_t>(i)].size();
    unseen_total += split.hops[static_cast<std::size_t>(i)].size();
  }
  classes["unseen_total"] = unseen_total;
  classes["total"] = split.total_classes();
  stats["classes"] = classes;
  stats["seen_fraction"] = split.seen_fraction;

  if (args.manifest) {
    ManifestOptions options;
    options.check_paths = false;
    const Manifest manifest = Manifest::load(*args.manifest, options);
    manifest.validate_classes(split_classes(split));
    const auto count_samples = [&manifest, &split](SampleDomain domain) {
      nlohmann::json counts;
      std::map<std::string, std::size_t> per_set = {
          {"seen", 0}, {"hop1", 0}, {"hop2", 0},
          {"hop3", 0}, {"hop4", 0}};
      for (const auto& r : manifest.records) {
        if (r.domain != domain) {
          continue;
        }
        const auto hop = split.hop_of(r.class_id);
        if (!hop) {
          continue;
        }
        if (*hop == 0) {
          ++per_set["seen"];
        } else {
          ++per_set["hop" + std::to_string(*hop)];
        }
      }
      std::size_t total = 0;
      for (const auto& [key, n] : per_set) {
        counts[key] = n;
        total += n;
      }
      counts["total"] = total;
      return counts;
    };
    stats["samples"] = {{"photos", count_samples(SampleDomain::photo)},
                        {"illustrations",
                         count_samples(SampleDomain::illustration)}};
  }
  write_json_file(run.file("stats.json"), stats);
  run.log({{"event", "wrote"}, {"file", "stats.json"}});
  run.log({{"event", "done"}});
}

void cmd_encode(const EncodeArgs& args) {
  RunDir run(args.out);
  const Manifest manifest = Manifest::load(args.manifest);
  const std::vector<std::string> classes = manifest.class_ids();

  LabeledVectors data;
  data.classes = classes;
  ManifestSelection select_illustrations;
  select_illustrations.domain = SampleDomain::illustration;
  const LoadedSamples loaded = load_manifest_features(
      manifest, classes, select_illustrations, args.manifest.parent_path());
  data.data = loaded.data;
  if (data.data.size() == 0) {
    throw EmptyClassList("manifest holds no illustration samples");
  }

  CeConfig cfg;
  if (args.config) {
    cfg = CeConfig::from_json(read_json_file(*args.config));
  }
  cfg.input_dim = data.data.dim();
  cfg.seed = derive_seed(args.seed, "ce");

  nlohmann::json config = base_config("encode", args.seed);
  config["manifest"] = args.manifest.string();
  config["resolved"] = cfg.to_json();
  run.write_config(config);

  CeTrainer trainer(cfg, static_cast<int>(classes.size()));
  std::ofstream log(run.file("train_log.jsonl"));
  trainer.train(data, [&log](std::int64_t iter, const CeStepLosses& losses) {
    log << nlohmann::json({{"iter", iter},
                           {"loss_cls", losses.cls},
                           {"loss_cont", losses.cont},
                           {"total", losses.total()}})
               .dump()
        << '\n';
  });
  log.close();

  const auto descriptors = trainer.descriptors(data);
  export_descriptors_text(descriptors, run.file("descriptors.csv"));
  export_descriptors_binary(descriptors, run.file("descriptors.bin"));
  run.log({{"event", "wrote"}, {"file", "descriptors.csv"}});
  run.log({{"event", "wrote"}, {"file", "descriptors.bin"}});
  run.log({{"event", "done"}, {"iterations", trainer.iteration()}});
}

void cmd_train_pa(const TrainPaArgs& args) {
  RunDir run(args.out);
  const Split split = Split::load(args.split);
  const Manifest manifest = Manifest::load(args.manifest);
  manifest.validate_zsl(split);

  const std::vector<std::string> classes = split_classes(split);
  manifest.validate_classes(classes);

  PaDataset dataset;
  dataset.classes = classes;
  dataset.seen_classes = split.seen;
  const auto base_dir = args.manifest.parent_path();
  dataset.source = load_manifest_features(
                       manifest, classes,
                       {.domain = SampleDomain::illustration,
                        .split_tag = std::string("train")},
                       base_dir)
                       .data;
  dataset.target = load_manifest_features(manifest, classes,
                                          {.domain = SampleDomain::photo,
                                           .split_tag = std::string("train")},
                                          base_dir)
                       .data;
  if (dataset.source.size() == 0) {
    throw EmptyClassList("manifest holds no illustration training samples");
  }

  PaConfig cfg;
  if (args.config) {
    cfg = PaConfig::from_json(read_json_file(*args.config));
  }
  cfg.input_dim = dataset.source.dim();
  cfg.seed = derive_seed(args.seed, "pa");

  nlohmann::json config = base_config("train-pa", args.seed);
  config["manifest"] = args.manifest.string();
  config["split"] = args.split.string();
  config["resolved"] = cfg.to_json();
  run.write_config(config);

  PaTrainer trainer(cfg, dataset.classes, dataset.seen_classes);
  std::ofstream log(run.file("train_log.jsonl"));
  trainer.train(dataset,
                [&log](std::int64_t iter, const PaLossBreakdown& losses) {
                  nlohmann::json rec = losses.to_json();
                  rec["iter"] = iter;
                  log << rec.dump() << '\n';
                });
  log.close();

  trainer.save_checkpoint(run.file("checkpoint.json"));
  run.log({{"event", "wrote"}, {"file", "checkpoint.json"}});
  run.log({{"event", "done"}, {"iterations", trainer.iteration()}});
}

void cmd_predict(const PredictArgs& args) {
  RunDir run(args.out);
  const PaTrainer trainer = PaTrainer::load_checkpoint(args.checkpoint);
  const Manifest manifest = Manifest::load(args.manifest);

  nlohmann::json config = base_config("predict", 0);
  config["checkpoint"] = args.checkpoint.string();
  config["manifest"] = args.manifest.string();
  config["split_tag"] = args.split_tag;
  config["topk"] = args.topk;
  run.write_config(config);

  const LoadedSamples samples = load_manifest_features(
      manifest, trainer.classes(),
      {.domain = SampleDomain::photo, .split_tag = args.split_tag},
      args.manifest.parent_path());
  if (samples.data.size() == 0) {
    throw EmptyClassList("no photo samples with split tag '" + args.split_tag +
                         "'");
  }
  const PredictionSet preds = rank_predictions(
      samples.data, samples.sample_ids, trainer.classes(), args.topk,
      [&trainer](const Eigen::VectorXd& x) {
        return trainer.predict_logits(x);
      });
  save_predictions(preds, run.file("predictions.csv"));
  run.log({{"event", "wrote"}, {"file", "predictions.csv"}});
  run.log({{"event", "done"}, {"samples", preds.size()}});
}

void cmd_eval(const EvalArgs& args) {
  RunDir run(args.out);
  const Split split = Split::load(args.split);
  const Taxonomy tax = Taxonomy::load_csv(args.taxonomy);

  PredictionSet preds;
  if (args.predictions) {
    preds = load_predictions(*args.predictions);
  } else if (args.checkpoint && args.manifest) {
    const PaTrainer trainer = PaTrainer::load_checkpoint(*args.checkpoint);
    const Manifest manifest = Manifest::load(*args.manifest);
    const LoadedSamples samples = load_manifest_features(
        manifest, trainer.classes(),
        {.domain = SampleDomain::photo, .split_tag = args.split_tag},
        args.manifest->parent_path());
    const int max_k = *std::max_element(args.ks.begin(), args.ks.end());
    preds = rank_predictions(samples.data, samples.sample_ids,
                             trainer.classes(), max_k,
                             [&trainer](const Eigen::VectorXd& x) {
                               return trainer.predict_logits(x);
                             });
  } else {
    throw InvalidConfig(
        "eval needs either --predictions or --checkpoint with --manifest");
  }

  nlohmann::json config = base_config("eval", args.seed);
  if (args.predictions) config["predictions"] = args.predictions->string();
  if (args.checkpoint) config["checkpoint"] = args.checkpoint->string();
  if (args.manifest) config["manifest"] = args.manifest->string();
  config["split"] = args.split.string();
  config["taxonomy"] = args.taxonomy.string();
  config["ks"] = args.ks;
  config["averaging"] = args.averaging;
  run.write_config(config);

  const GZSLReport report = build_report(
      preds, split, tax, args.ks, averaging_from_string(args.averaging));
  write_json_file(run.file("report.json"), report.to_json());
  write_text_file(run.file("report.txt"), report.to_table());
  run.log({{"event", "wrote"}, {"file", "report.json"}});
  run.log({{"event", "done"}, {"samples", report.num_samples}});
}

void cmd_synth_bench(const SynthBenchArgs& args) {
  RunDir run(args.out);
  BenchConfig cfg;
  if (args.config) {
    cfg = BenchConfig::from_json(read_json_file(*args.config));
  }
  cfg.seed = args.seed;

  nlohmann::json config = base_config("synth-bench", args.seed);
  config["resolved"] = cfg.to_json();
  run.write_config(config);

  const BenchResult result = run_synth_bench(cfg);
  write_json_file(run.file("report.json"), result.to_json());
  write_text_file(run.file("report.txt"),
                  "chance = " + format_double(result.chance_percent) +
                      " %\n\n== prototype alignment ==\n" +
                      result.pa_report.to_table() +
                      "\n== photos-only supervised baseline ==\n" +
                      result.baseline_report.to_table());
  run.log({{"event", "wrote"}, {"file", "report.json"}});
  run.log({{"event", "done"}});
}

}  // namespace gzsl::cli
