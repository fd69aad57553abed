// SPDX-License-Identifier: Apache-2.0
//
// Prototype alignment: a single encoder over illustrations and photographs,
// per-domain momentum prototype banks, in-domain contrastive loss and
// dual-domain prototype classification. Inference ranks photo embeddings
// against the illustration prototypes.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gzsl/bank.hpp"
#include "gzsl/dataset.hpp"
#include "gzsl/gradcheck.hpp"
#include "gzsl/nn.hpp"
#include "gzsl/optim.hpp"

namespace gzsl {

enum class ClassifierKind { prototype_dot, learned };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct PaConfig {
  // Architecture.
  int input_dim = 0;
  int hidden_dim = 64;
  int embed_dim = 32;
  HeadKind head = HeadKind::identity;
  int head_hidden = 32;
  ClassifierKind classifier = ClassifierKind::prototype_dot;
  bool extra_cls = true;  // classification against the target bank (seen only)

  // Loss weights.
  double momentum = 0.9;
  double tau = 0.1;
  double lambda_c_source = 1.0;
  double lambda_c_target = 1.0;
  double lambda_cls_source = 1.0;
  double lambda_cls_target = 0.1;
  double logit_scale = 1.0;

  // Optimization.
  double lr = 1e-4;
  double backbone_lr_scale = 0.1;
  int batch_source = 16;
  int batch_target = 16;
  int iterations = 2000;
  int log_every = 50;
  std::uint64_t seed = 0;

  void validate() const;  // InvalidConfig
  nlohmann::json to_json() const;
  static PaConfig from_json(const nlohmann::json& j);
};

// Ablation knobs. Defaults reproduce the strongest configuration
// (prototype-dot classifier, identity head, lambda_c on, light target
// classification weight, target-bank term on).
struct AblationChoices {
  ClassifierKind classifier = ClassifierKind::prototype_dot;
  HeadKind head = HeadKind::identity;
  double lambda_c = 1.0;          // {0, 1}, applied to both domains
  double lambda_cls_target = 0.1; // {0.1, 1.0}
  bool extra_cls = true;
};

// Applies a choice set onto a base config; rejects values off the ablation
// grid (InvalidConfig).
PaConfig ablation_variant(PaConfig base, const AblationChoices& choices);

// Named rows of the ablation grid, 'A'..'F'. 'F' equals the defaults.
AblationChoices ablation_row(char row);

struct MixedBatch {
  Eigen::MatrixXd x_source;    // may be empty
  std::vector<int> y_source;   // global class indices
  Eigen::MatrixXd x_target;    // may be empty
  std::vector<int> y_target;   // global class indices, seen classes only
};

struct PaLossBreakdown {
  // Raw per-domain sums, before the lambda weights.
  double lc_source = 0.0;
  double lc_target = 0.0;
  double lcls_source = 0.0;
  double lcls_target = 0.0;
  // Weighted total actually optimized.
  double total = 0.0;
  // Loss terms skipped because a label's prototype was not yet initialized.
  int skipped_terms = 0;

  nlohmann::json to_json() const;
};

struct PaDataset {
  std::vector<std::string> classes;       // global ordered class list
  std::vector<std::string> seen_classes;  // subset with photo supervision
  DomainData source;                      // labels over all classes
  DomainData target;                      // labels restricted to seen classes
};

class PaTrainer {
 public:
  PaTrainer(PaConfig cfg, std::vector<std::string> classes,
            std::vector<std::string> seen_classes);

  // One atomic training step: encode, losses, optimizer update, then bank
  // momentum updates with this step's embeddings.
  PaLossBreakdown step(const MixedBatch& batch);

  // Uniform per-domain batch for the given iteration, reproducible from seed.
  MixedBatch sample_batch(const PaDataset& data, std::int64_t iteration) const;

  void train(const PaDataset& data,
             const std::function<void(std::int64_t, const PaLossBreakdown&)>&
                 log_sink = nullptr);

  Eigen::VectorXd embed(const Eigen::VectorXd& x) const;

  // Logits over all classes. Prototype classifier: dot products against the
  // source (illustration) bank, which must be fully initialized.
  Eigen::VectorXd predict_logits(const Eigen::VectorXd& x) const;

  const PrototypeBank& source_bank() const { return bank_source_; }
  const PrototypeBank& target_bank() const { return bank_target_; }
  PrototypeBank& mutable_source_bank() { return bank_source_; }
  PrototypeBank& mutable_target_bank() { return bank_target_; }
  const MlpEncoder& encoder() const { return encoder_; }
  const PaConfig& config() const { return cfg_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::int64_t iteration() const { return iteration_; }

  // Losses with banks held fixed (no update), e.g. for verification.
  PaLossBreakdown eval_losses(const MixedBatch& batch) const;

  // Flat parameters [encoder | head | classifier] and the weighted total loss
  // as a differentiable function of them (banks frozen).
  std::size_t param_count() const;
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& theta);
  DifferentiableLoss make_loss(MixedBatch batch) const;

  // Versioned checkpoint: parameters, both banks (class-id keyed), optimizer
  // state, config, iteration counter.
  nlohmann::json to_checkpoint() const;
  static PaTrainer from_checkpoint(const nlohmann::json& j);
  void save_checkpoint(const std::filesystem::path& path) const;
  static PaTrainer load_checkpoint(const std::filesystem::path& path);

 private:
  PaLossBreakdown losses_and_grad(const MixedBatch& batch,
                                  Eigen::VectorXd* grad,
                                  Eigen::MatrixXd* z_source,
                                  Eigen::MatrixXd* z_target) const;

  PaConfig cfg_;
  std::vector<std::string> classes_;
  MlpEncoder encoder_;
  ProjectionHead head_;
  LinearClassifier classifier_;  // used when cfg_.classifier == learned
  PrototypeBank bank_source_;
  PrototypeBank bank_target_;
  Adam opt_;
  std::int64_t iteration_ = 0;
};

}  // namespace gzsl
