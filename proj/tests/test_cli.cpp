// SPDX-License-Identifier: Apache-2.0
//
// End-to-end command tests: the in-process command functions plus a few runs
// of the installed binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gzsl/cli.hpp"
#include "gzsl/descriptors.hpp"
#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/linalg.hpp"
#include "gzsl/manifest.hpp"
#include "gzsl/metrics.hpp"
#include "gzsl/split.hpp"
#include "gzsl/synthetic.hpp"
#include "gzsl/taxonomy.hpp"
#include "test_util.hpp"

using namespace gzsl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Materializes a synthetic dataset as feature files plus a manifest, the way
// a user would prepare precomputed backbone features.
fs::path write_dataset_files(const SyntheticData& data, const fs::path& dir) {
  fs::create_directories(dir / "features");
  std::ostringstream manifest;
  manifest << "path,class_id,domain,split\n";
  const auto dump = [&](const DomainData& d, const char* domain,
                        const char* split, const char* tag) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const std::string rel = "features/" + std::string(tag) + "_" +
                              std::to_string(i) + ".txt";
      save_feature_file(dir / rel, d.x.row(i).transpose());
      manifest << rel << ','
               << data.classes[static_cast<std::size_t>(
                      d.labels[static_cast<std::size_t>(i)])]
               << ',' << domain << ',' << split << '\n';
    }
  };
  dump(data.source_train, "illustration", "train", "ill");
  dump(data.target_train, "photo", "train", "photo_train");
  dump(data.target_test, "photo", "test", "photo_test");
  const fs::path manifest_path = dir / "manifest.csv";
  write_text_file(manifest_path, manifest.str());
  return manifest_path;
}

SyntheticData small_dataset(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_classes = 8;
  spec.latent_dim = 6;
  spec.obs_dim = 12;
  spec.seen_fraction = 0.5;
  spec.source_train_per_class = 4;
  spec.target_train_per_class = 8;
  spec.target_test_per_class = 4;
  spec.sigma_source = 0.3;
  spec.sigma_target = 0.3;
  spec.domain_gap = 0.5;
  spec.seed = seed;
  return generate_synthetic(spec);
}

}  // namespace

TEST_CASE("cmd_split is deterministic and reports hop stats") {
  TempDir tmp("gzsl_cli_split");
  Rng rng(1);
  const Taxonomy tax = testutil::random_taxonomy(rng, 80);
  tax.export_csv(tmp.path / "taxonomy.csv");

  cli::SplitArgs args;
  args.taxonomy = tmp.path / "taxonomy.csv";
  args.seen_count = 30;
  args.seed = 77;
  args.out = tmp.path / "run_a";
  cli::cmd_split(args);
  args.out = tmp.path / "run_b";
  cli::cmd_split(args);

  const std::string split_a = read_text_file(tmp.path / "run_a/split.json");
  CHECK(split_a == read_text_file(tmp.path / "run_b/split.json"));
  CHECK(fs::exists(tmp.path / "run_a/config.json"));
  CHECK(fs::exists(tmp.path / "run_a/log.jsonl"));

  const auto stats = read_json_file(tmp.path / "run_a/stats.json");
  std::size_t hop_total = 0;
  for (int hop = 1; hop <= 4; ++hop) {
    hop_total +=
        stats.at("classes").at("hop" + std::to_string(hop)).get<std::size_t>();
  }
  CHECK(hop_total == stats.at("classes").at("unseen_total").get<std::size_t>());
  CHECK(stats.at("classes").at("seen").get<std::size_t>() == 30);
  CHECK(stats.at("classes").at("total").get<std::size_t>() == 80);

  // A different seed moves the split.
  args.seed = 78;
  args.out = tmp.path / "run_c";
  cli::cmd_split(args);
  CHECK(read_text_file(tmp.path / "run_c/split.json") != split_a);
}

TEST_CASE("an 896-class list with 381 seen leaves 515 unseen classes") {
  TempDir tmp("gzsl_cli_split_paper_scale");
  Rng rng(2);
  const Taxonomy tax = testutil::random_taxonomy(rng, 896);
  tax.export_csv(tmp.path / "taxonomy.csv");

  cli::SplitArgs args;
  args.taxonomy = tmp.path / "taxonomy.csv";
  args.seen_count = 381;
  args.seed = 1;
  args.out = tmp.path / "run";
  cli::cmd_split(args);

  const Split split = Split::load(tmp.path / "run/split.json");
  CHECK(split.seen.size() == 381);
  CHECK(split.unseen().size() == 515);
  const auto stats = read_json_file(tmp.path / "run/stats.json");
  CHECK(stats.at("classes").at("unseen_total").get<std::size_t>() == 515);
}

TEST_CASE("encode exports unit-norm descriptors deterministically") {
  TempDir tmp("gzsl_cli_encode");
  const SyntheticData data = small_dataset(11);
  const fs::path manifest = write_dataset_files(data, tmp.path);

  const nlohmann::json ce_config = {{"iterations", 40},
                                    {"embed_dim", 6},
                                    {"hidden_dim", 16},
                                    {"batch_classes", 4}};
  write_json_file(tmp.path / "ce.json", ce_config);

  cli::EncodeArgs args;
  args.manifest = manifest;
  args.config = tmp.path / "ce.json";
  args.seed = 5;
  args.out = tmp.path / "enc_a";
  cli::cmd_encode(args);
  args.out = tmp.path / "enc_b";
  cli::cmd_encode(args);

  const auto descriptors =
      import_descriptors_text(tmp.path / "enc_a/descriptors.csv");
  CHECK(descriptors.size() == data.classes.size());
  for (const auto& d : descriptors) {
    CHECK(std::abs(d.phi.norm() - 1.0) < 1e-6);
  }
  CHECK(read_text_file(tmp.path / "enc_a/descriptors.csv") ==
        read_text_file(tmp.path / "enc_b/descriptors.csv"));
  CHECK(read_text_file(tmp.path / "enc_a/descriptors.bin") ==
        read_text_file(tmp.path / "enc_b/descriptors.bin"));

  // Binary and text exports agree.
  const auto bin =
      import_descriptors_binary(tmp.path / "enc_a/descriptors.bin");
  REQUIRE(bin.size() == descriptors.size());
  for (std::size_t i = 0; i < bin.size(); ++i) {
    CHECK((bin[i].phi - descriptors[i].phi).cwiseAbs().maxCoeff() < 1e-6);
  }
  CHECK(fs::exists(tmp.path / "enc_a/train_log.jsonl"));
}

TEST_CASE("train-pa, predict and eval run end to end") {
  TempDir tmp("gzsl_cli_pa");
  const SyntheticData data = small_dataset(13);
  const fs::path manifest = write_dataset_files(data, tmp.path);
  data.split.save(tmp.path / "split.json");
  data.taxonomy.export_csv(tmp.path / "taxonomy.csv");

  const nlohmann::json pa_config = {{"iterations", 150},
                                    {"embed_dim", 8},
                                    {"hidden_dim", 16},
                                    {"lr", 1e-3},
                                    {"backbone_lr_scale", 1.0},
                                    {"batch_source", 8},
                                    {"batch_target", 8},
                                    {"log_every", 10},
                                    {"logit_scale", 4.0},
                                    {"lambda_cls_target", 0.7}};
  write_json_file(tmp.path / "pa.json", pa_config);

  cli::TrainPaArgs train_args;
  train_args.manifest = manifest;
  train_args.split = tmp.path / "split.json";
  train_args.config = tmp.path / "pa.json";
  train_args.seed = 9;
  train_args.out = tmp.path / "train";
  cli::cmd_train_pa(train_args);

  CHECK(fs::exists(tmp.path / "train/checkpoint.json"));
  // Config overrides are echoed into the resolved config.
  const auto echoed = read_json_file(tmp.path / "train/config.json");
  CHECK(echoed.at("resolved").at("lambda_cls_target").get<double>() == 0.7);

  // The training log trends down: final total under half the first record.
  std::ifstream log(tmp.path / "train/train_log.jsonl");
  std::string line;
  double first_total = -1.0, last_total = -1.0;
  while (std::getline(log, line)) {
    if (line.empty()) {
      continue;
    }
    const auto rec = nlohmann::json::parse(line);
    if (first_total < 0.0) {
      first_total = rec.at("total").get<double>();
    }
    last_total = rec.at("total").get<double>();
  }
  REQUIRE(first_total > 0.0);
  CHECK(last_total < 0.5 * first_total);

  cli::PredictArgs predict_args;
  predict_args.checkpoint = tmp.path / "train/checkpoint.json";
  predict_args.manifest = manifest;
  predict_args.split_tag = "test";
  predict_args.topk = 8;
  predict_args.out = tmp.path / "predict";
  cli::cmd_predict(predict_args);
  const PredictionSet preds =
      load_predictions(tmp.path / "predict/predictions.csv");
  CHECK(preds.size() ==
        static_cast<std::size_t>(data.target_test.size()));

  // Evaluating the prediction file and the checkpoint agree.
  cli::EvalArgs eval_args;
  eval_args.predictions = tmp.path / "predict/predictions.csv";
  eval_args.split = tmp.path / "split.json";
  eval_args.taxonomy = tmp.path / "taxonomy.csv";
  eval_args.ks = {1, 5};
  eval_args.out = tmp.path / "eval_a";
  cli::cmd_eval(eval_args);

  cli::EvalArgs eval_ckpt;
  eval_ckpt.checkpoint = tmp.path / "train/checkpoint.json";
  eval_ckpt.manifest = manifest;
  eval_ckpt.split = tmp.path / "split.json";
  eval_ckpt.taxonomy = tmp.path / "taxonomy.csv";
  eval_ckpt.ks = {1, 5};
  eval_ckpt.out = tmp.path / "eval_b";
  cli::cmd_eval(eval_ckpt);

  const auto report_a = read_json_file(tmp.path / "eval_a/report.json");
  const auto report_b = read_json_file(tmp.path / "eval_b/report.json");
  CHECK(report_a.at("topk") == report_b.at("topk"));

  // H is consistent with S and U in the written report.
  for (const auto& k : {"1", "5"}) {
    const auto& t = report_a.at("topk").at(k);
    CHECK(t.at("H").get<double>() ==
          doctest::Approx(harmonic_mean(t.at("S").get<double>(),
                                        t.at("U").get<double>())));
  }
  CHECK(report_a.at("hop_topk").at("1").size() == 4);
}

TEST_CASE("train-pa rejects photo leaks of unseen classes") {
  TempDir tmp("gzsl_cli_leak");
  const SyntheticData data = small_dataset(17);
  const fs::path manifest_path = write_dataset_files(data, tmp.path);
  data.split.save(tmp.path / "split.json");

  // Retag one unseen-class test photo as a training photo.
  const std::string unseen_class = data.split.hops[0].empty()
                                       ? data.split.unseen().front()
                                       : data.split.hops[0].front();
  std::istringstream in(read_text_file(manifest_path));
  std::ostringstream out;
  std::string line;
  bool corrupted = false;
  while (std::getline(in, line)) {
    if (!corrupted && line.find(",photo,test") != std::string::npos &&
        line.find("," + unseen_class + ",") != std::string::npos) {
      line = line.substr(0, line.rfind(",test")) + ",train";
      corrupted = true;
    }
    out << line << '\n';
  }
  REQUIRE(corrupted);
  write_text_file(manifest_path, out.str());

  cli::TrainPaArgs args;
  args.manifest = manifest_path;
  args.split = tmp.path / "split.json";
  args.seed = 1;
  args.out = tmp.path / "train";
  CHECK_THROWS_AS(cli::cmd_train_pa(args), UnseenPhotoLeak);
}

TEST_CASE("synth-bench writes a two-method report") {
  TempDir tmp("gzsl_cli_bench");
  const nlohmann::json config = {
      {"spec",
       {{"num_classes", 10}, {"latent_dim", 6}, {"obs_dim", 12},
        {"seen_fraction", 0.6}, {"target_test_per_class", 5}}},
      {"pa", {{"iterations", 80}, {"embed_dim", 8}, {"hidden_dim", 16},
              {"lr", 1e-3}, {"backbone_lr_scale", 1.0}}},
      {"baseline", {{"iterations", 80}}}};
  write_json_file(tmp.path / "bench.json", config);

  cli::SynthBenchArgs args;
  args.config = tmp.path / "bench.json";
  args.seed = 3;
  args.out = tmp.path / "bench_a";
  cli::cmd_synth_bench(args);
  args.out = tmp.path / "bench_b";
  cli::cmd_synth_bench(args);

  const auto report = read_json_file(tmp.path / "bench_a/report.json");
  CHECK(report.contains("pa"));
  CHECK(report.contains("baseline"));
  CHECK(report.at("chance_percent").get<double>() == doctest::Approx(10.0));
  CHECK(report.at("pa").at("topk").contains("1"));
  CHECK(report.at("baseline").at("topk").contains("10"));

  // Byte-identical reruns.
  CHECK(read_text_file(tmp.path / "bench_a/report.json") ==
        read_text_file(tmp.path / "bench_b/report.json"));
}

#ifdef GZSL_CLI_PATH
TEST_CASE("the binary returns clean exit codes and error records") {
  TempDir tmp("gzsl_cli_binary");
  Rng rng(3);
  const Taxonomy tax = testutil::random_taxonomy(rng, 40);
  tax.export_csv(tmp.path / "taxonomy.csv");

  const std::string bin = GZSL_CLI_PATH;
  const std::string ok_cmd =
      bin + " split --taxonomy " + (tmp.path / "taxonomy.csv").string() +
      " --seen-count 15 --seed 4 --out " + (tmp.path / "run").string();
  CHECK(std::system(ok_cmd.c_str()) == 0);
  CHECK(fs::exists(tmp.path / "run/split.json"));

  const std::string bad_cmd =
      bin + " split --taxonomy " + (tmp.path / "missing.csv").string() +
      " --seen-count 15 --seed 4 --out " + (tmp.path / "run2").string() +
      " 2> " + (tmp.path / "err.txt").string();
  CHECK(std::system(bad_cmd.c_str()) != 0);
  const auto err = nlohmann::json::parse(read_text_file(tmp.path / "err.txt"));
  CHECK(err.at("error").get<std::string>() == "missing_file");
}
#endif
