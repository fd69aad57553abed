// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the CLI. Each command is deterministic given
// (inputs, config, seed) and writes a resolved config echo, its outputs and a
// machine-readable log into the run directory.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gzsl::cli {

// Run directory helper: config echo, outputs, append-only JSONL log. Log
// records carry sequence numbers rather than wall time so reruns with the
// same seed stay byte-identical.
class RunDir {
 public:
  explicit RunDir(std::filesystem::path out);

  const std::filesystem::path& path() const { return out_; }
  std::filesystem::path file(const std::string& name) const;

  void write_config(const nlohmann::json& config) const;
  void log(nlohmann::json event);

 private:
  std::filesystem::path out_;
  int sequence_ = 0;
};

struct SplitArgs {
  std::filesystem::path taxonomy;
  std::size_t seen_count = 0;
  std::optional<std::filesystem::path> manifest;  // enables sample counts
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
void cmd_split(const SplitArgs& args);

struct EncodeArgs {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
void cmd_encode(const EncodeArgs& args);

struct TrainPaArgs {
  std::filesystem::path manifest;
  std::filesystem::path split;
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
void cmd_train_pa(const TrainPaArgs& args);

struct PredictArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  std::string split_tag = "test";
  int topk = 10;
  std::filesystem::path out;
};
void cmd_predict(const PredictArgs& args);

struct EvalArgs {
  std::optional<std::filesystem::path> predictions;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> manifest;
  std::string split_tag = "test";
  std::filesystem::path split;
  std::filesystem::path taxonomy;
  std::vector<int> ks = {1, 5, 10};
  std::string averaging = "macro";
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
void cmd_eval(const EvalArgs& args);

struct SynthBenchArgs {
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
void cmd_synth_bench(const SynthBenchArgs& args);

}  // namespace gzsl::cli
