// SPDX-License-Identifier: Apache-2.0
//
// gzsl — generalized zero-shot learning toolkit with visual side information.
//
// Subcommands: split, encode, train-pa, predict, eval, synth-bench. Every run
// writes a resolved config echo, its outputs and a machine-readable log into
// the --out directory. Exit code 0 on success; failures emit a JSON error
// record on stderr.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gzsl/cli.hpp"
#include "gzsl/errors.hpp"
#include "gzsl/version.hpp"

namespace {

std::vector<int> parse_ks(const std::string& csv) {
  std::vector<int> ks;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto pos = csv.find(',', start);
    const auto token = csv.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!token.empty()) {
      ks.push_back(std::stoi(token));
    }
    if (pos == std::string::npos) {
      break;
    }
    start = pos + 1;
  }
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized zero-shot learning with visual side information"};
  app.set_version_flag("--version", gzsl::kVersion);
  app.require_subcommand(1);

  // split
  gzsl::cli::SplitArgs split_args;
  std::string split_manifest;
  auto* split_cmd = app.add_subcommand(
      "split", "Build a seeded seen/unseen split with hop sets");
  split_cmd->add_option("--taxonomy", split_args.taxonomy,
                        "Taxonomy table (species_id,genus,family,order)")
      ->required();
  split_cmd->add_option("--seen-count", split_args.seen_count,
                        "Number of seen classes")
      ->required();
  split_cmd->add_option("--manifest", split_manifest,
                        "Optional manifest for per-set sample counts");
  split_cmd->add_option("--seed", split_args.seed, "Global seed");
  split_cmd->add_option("--out", split_args.out, "Run directory")->required();

  // encode
  gzsl::cli::EncodeArgs encode_args;
  std::string encode_config;
  auto* encode_cmd = app.add_subcommand(
      "encode", "Train the contrastive encoder and export class descriptors");
  encode_cmd->add_option("--manifest", encode_args.manifest,
                         "Manifest of illustration feature files")
      ->required();
  encode_cmd->add_option("--config", encode_config, "Encoder config (JSON)");
  encode_cmd->add_option("--seed", encode_args.seed, "Global seed");
  encode_cmd->add_option("--out", encode_args.out, "Run directory")->required();

  // train-pa
  gzsl::cli::TrainPaArgs pa_args;
  std::string pa_config;
  auto* pa_cmd = app.add_subcommand(
      "train-pa", "Train prototype alignment over both domains");
  pa_cmd->add_option("--manifest", pa_args.manifest,
                     "Manifest of illustration and photo feature files")
      ->required();
  pa_cmd->add_option("--split", pa_args.split, "Split file (JSON)")->required();
  pa_cmd->add_option("--config", pa_config, "Training config (JSON)");
  pa_cmd->add_option("--seed", pa_args.seed, "Global seed");
  pa_cmd->add_option("--out", pa_args.out, "Run directory")->required();

  // predict
  gzsl::cli::PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand(
      "predict", "Rank classes for photos with a trained checkpoint");
  predict_cmd->add_option("--checkpoint", predict_args.checkpoint,
                          "Checkpoint file")
      ->required();
  predict_cmd->add_option("--manifest", predict_args.manifest,
                          "Manifest of photo feature files")
      ->required();
  predict_cmd->add_option("--split-tag", predict_args.split_tag,
                          "Manifest split tag to score (default test)");
  predict_cmd->add_option("--topk", predict_args.topk,
                          "Ranks to keep per sample");
  predict_cmd->add_option("--out", predict_args.out, "Run directory")
      ->required();

  // eval
  gzsl::cli::EvalArgs eval_args;
  std::string eval_predictions, eval_checkpoint, eval_manifest, eval_ks;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Compute the GZSL report for predictions or a checkpoint");
  eval_cmd->add_option("--predictions", eval_predictions, "Prediction file");
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint file");
  eval_cmd->add_option("--manifest", eval_manifest,
                       "Manifest (with --checkpoint)");
  eval_cmd->add_option("--split-tag", eval_args.split_tag,
                       "Manifest split tag to score (default test)");
  eval_cmd->add_option("--split", eval_args.split, "Split file")->required();
  eval_cmd->add_option("--taxonomy", eval_args.taxonomy, "Taxonomy table")
      ->required();
  eval_cmd->add_option("--ks", eval_ks, "Comma-separated ks (default 1,5,10)");
  eval_cmd->add_option("--averaging", eval_args.averaging,
                       "macro (per-class) or micro (per-sample)");
  eval_cmd->add_option("--seed", eval_args.seed, "Global seed");
  eval_cmd->add_option("--out", eval_args.out, "Run directory")->required();

  // synth-bench
  gzsl::cli::SynthBenchArgs bench_args;
  std::string bench_config;
  auto* bench_cmd = app.add_subcommand(
      "synth-bench",
      "Run the synthetic two-domain benchmark: prototype alignment vs a "
      "photos-only supervised baseline");
  bench_cmd->add_option("--config", bench_config, "Benchmark config (JSON)");
  bench_cmd->add_option("--seed", bench_args.seed, "Global seed");
  bench_cmd->add_option("--out", bench_args.out, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (split_cmd->parsed()) {
      if (!split_manifest.empty()) {
        split_args.manifest = split_manifest;
      }
      gzsl::cli::cmd_split(split_args);
    } else if (encode_cmd->parsed()) {
      if (!encode_config.empty()) {
        encode_args.config = encode_config;
      }
      gzsl::cli::cmd_encode(encode_args);
    } else if (pa_cmd->parsed()) {
      if (!pa_config.empty()) {
        pa_args.config = pa_config;
      }
      gzsl::cli::cmd_train_pa(pa_args);
    } else if (predict_cmd->parsed()) {
      gzsl::cli::cmd_predict(predict_args);
    } else if (eval_cmd->parsed()) {
      if (!eval_predictions.empty()) {
        eval_args.predictions = eval_predictions;
      }
      if (!eval_checkpoint.empty()) {
        eval_args.checkpoint = eval_checkpoint;
      }
      if (!eval_manifest.empty()) {
        eval_args.manifest = eval_manifest;
      }
      if (!eval_ks.empty()) {
        eval_args.ks = parse_ks(eval_ks);
      }
      gzsl::cli::cmd_eval(eval_args);
    } else if (bench_cmd->parsed()) {
      if (!bench_config.empty()) {
        bench_args.config = bench_config;
      }
      gzsl::cli::cmd_synth_bench(bench_args);
    }
  } catch (const gzsl::Error& e) {
    std::cerr << nlohmann::json({{"error", e.code()}, {"message", e.what()}})
                     .dump()
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json(
                     {{"error", "internal"}, {"message", e.what()}})
                     .dump()
              << std::endl;
    return 2;
  }
  return 0;
}
