// SPDX-License-Identifier: Apache-2.0
#include "gzsl/pa_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/linalg.hpp"
#include "gzsl/pa_losses.hpp"
#include "gzsl/rng.hpp"

namespace gzsl {

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::prototype_dot ? "prototype_dot" : "learned";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "prototype_dot") return ClassifierKind::prototype_dot;
  if (s == "learned") return ClassifierKind::learned;
  throw InvalidConfig("unknown classifier kind: " + s);
}

void PaConfig::validate() const {
  if (hidden_dim <= 0 || embed_dim <= 0) {
    throw InvalidConfig("encoder dims must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidConfig("momentum must lie in [0, 1)");
  }
  if (!(tau > 0.0)) {
    throw InvalidConfig("tau must be positive");
  }
  if (lambda_c_source < 0.0 || lambda_c_target < 0.0 ||
      lambda_cls_source < 0.0 || lambda_cls_target < 0.0) {
    throw InvalidConfig("loss weights must be non-negative");
  }
  if (!(lr > 0.0) || backbone_lr_scale < 0.0) {
    throw InvalidConfig("learning rates must be positive");
  }
  if (batch_source < 0 || batch_target < 0 ||
      batch_source + batch_target == 0) {
    throw InvalidConfig("batch composition must include at least one sample");
  }
  if (iterations < 0) {
    throw InvalidConfig("iterations must be non-negative");
  }
}

nlohmann::json PaConfig::to_json() const {
  return {{"input_dim", input_dim},
          {"hidden_dim", hidden_dim},
          {"embed_dim", embed_dim},
          {"head", to_string(head)},
          {"head_hidden", head_hidden},
          {"classifier", to_string(classifier)},
          {"extra_cls", extra_cls},
          {"momentum", momentum},
          {"tau", tau},
          {"lambda_c_source", lambda_c_source},
          {"lambda_c_target", lambda_c_target},
          {"lambda_cls_source", lambda_cls_source},
          {"lambda_cls_target", lambda_cls_target},
          {"logit_scale", logit_scale},
          {"lr", lr},
          {"backbone_lr_scale", backbone_lr_scale},
          {"batch_source", batch_source},
          {"batch_target", batch_target},
          {"iterations", iterations},
          {"log_every", log_every},
          {"seed", seed}};
}

PaConfig PaConfig::from_json(const nlohmann::json& j) {
  PaConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  if (j.contains("head")) {
    c.head = head_kind_from_string(j.at("head").get<std::string>());
  }
  c.head_hidden = j.value("head_hidden", c.head_hidden);
  if (j.contains("classifier")) {
    c.classifier =
        classifier_kind_from_string(j.at("classifier").get<std::string>());
  }
  c.extra_cls = j.value("extra_cls", c.extra_cls);
  c.momentum = j.value("momentum", c.momentum);
  c.tau = j.value("tau", c.tau);
  c.lambda_c_source = j.value("lambda_c_source", c.lambda_c_source);
  c.lambda_c_target = j.value("lambda_c_target", c.lambda_c_target);
  c.lambda_cls_source = j.value("lambda_cls_source", c.lambda_cls_source);
  c.lambda_cls_target = j.value("lambda_cls_target", c.lambda_cls_target);
  c.logit_scale = j.value("logit_scale", c.logit_scale);
  c.lr = j.value("lr", c.lr);
  c.backbone_lr_scale = j.value("backbone_lr_scale", c.backbone_lr_scale);
  c.batch_source = j.value("batch_source", c.batch_source);
  c.batch_target = j.value("batch_target", c.batch_target);
  c.iterations = j.value("iterations", c.iterations);
  c.log_every = j.value("log_every", c.log_every);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

PaConfig ablation_variant(PaConfig base, const AblationChoices& choices) {
  if (choices.lambda_c != 0.0 && choices.lambda_c != 1.0) {
    throw InvalidConfig("ablation lambda_c must be 0 or 1");
  }
  if (choices.lambda_cls_target != 0.1 && choices.lambda_cls_target != 1.0) {
    throw InvalidConfig("ablation lambda_cls_target must be 0.1 or 1.0");
  }
  base.classifier = choices.classifier;
  base.head = choices.head;
  base.lambda_c_source = choices.lambda_c;
  base.lambda_c_target = choices.lambda_c;
  base.lambda_cls_target = choices.lambda_cls_target;
  base.extra_cls = choices.extra_cls;
  base.validate();
  return base;
}

AblationChoices ablation_row(char row) {
  AblationChoices c;  // row F
  switch (row) {
    case 'A':
      c.classifier = ClassifierKind::learned;
      c.extra_cls = false;
      break;
    case 'B':
      c.extra_cls = false;
      break;
    case 'C':
      c.lambda_c = 0.0;
      break;
    case 'D':
      c.head = HeadKind::mlp;
      break;
    case 'E':
      c.lambda_cls_target = 1.0;
      break;
    case 'F':
      break;
    default:
      throw InvalidConfig(std::string("unknown ablation row '") + row + "'");
  }
  return c;
}

nlohmann::json PaLossBreakdown::to_json() const {
  return {{"lc_source", lc_source},
          {"lc_target", lc_target},
          {"lcls_source", lcls_source},
          {"lcls_target", lcls_target},
          {"total", total},
          {"skipped_terms", skipped_terms}};
}

PaTrainer::PaTrainer(PaConfig cfg, std::vector<std::string> classes,
                     std::vector<std::string> seen_classes)
    : cfg_(cfg), classes_(std::move(classes)) {
  cfg_.validate();
  if (cfg_.input_dim <= 0) {
    throw InvalidConfig("input_dim must be resolved before construction");
  }
  if (classes_.empty()) {
    throw EmptyClassList("trainer needs at least one class");
  }
  bank_source_ = PrototypeBank(Domain::source, classes_, cfg_.embed_dim);
  bank_target_ =
      PrototypeBank(Domain::target, std::move(seen_classes), cfg_.embed_dim);
  for (const auto& c : bank_target_.classes()) {
    if (!bank_source_.index_of(c)) {
      throw UnknownClass("seen class '" + c + "' is not in the class list");
    }
  }

  // The encoder's last operation is the L2 normalization.
  encoder_ = MlpEncoder(cfg_.input_dim, cfg_.hidden_dim, cfg_.embed_dim,
                        /*normalize_output=*/true);
  head_ = cfg_.head == HeadKind::identity
              ? ProjectionHead::identity()
              : ProjectionHead::mlp(cfg_.embed_dim, cfg_.head_hidden,
                                    cfg_.embed_dim);
  classifier_ =
      LinearClassifier(cfg_.embed_dim, static_cast<int>(classes_.size()));

  Rng rng(derive_seed(cfg_.seed, "pa-init"));
  encoder_.init_params(rng);
  head_.init_params(rng);
  classifier_.init_params(rng);

  const auto n = static_cast<Eigen::Index>(param_count());
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
  scales.head(static_cast<Eigen::Index>(encoder_.param_count()))
      .setConstant(cfg_.backbone_lr_scale);
  opt_ = Adam(n, cfg_.lr, std::move(scales));
}

std::size_t PaTrainer::param_count() const {
  std::size_t n = encoder_.param_count() + head_.param_count();
  if (cfg_.classifier == ClassifierKind::learned) {
    n += classifier_.param_count();
  }
  return n;
}

Eigen::VectorXd PaTrainer::params() const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(param_count()));
  std::span<double> s(theta.data(), static_cast<std::size_t>(theta.size()));
  encoder_.get_params(s.subspan(0, encoder_.param_count()));
  head_.get_params(s.subspan(encoder_.param_count(), head_.param_count()));
  if (cfg_.classifier == ClassifierKind::learned) {
    classifier_.get_params(
        s.subspan(encoder_.param_count() + head_.param_count()));
  }
  return theta;
}

void PaTrainer::set_params(const Eigen::VectorXd& theta) {
  if (theta.size() != static_cast<Eigen::Index>(param_count())) {
    throw DimensionMismatch("parameter vector size mismatch");
  }
  std::span<const double> s(theta.data(),
                            static_cast<std::size_t>(theta.size()));
  encoder_.set_params(s.subspan(0, encoder_.param_count()));
  head_.set_params(s.subspan(encoder_.param_count(), head_.param_count()));
  if (cfg_.classifier == ClassifierKind::learned) {
    classifier_.set_params(
        s.subspan(encoder_.param_count() + head_.param_count()));
  }
}

Eigen::VectorXd PaTrainer::embed(const Eigen::VectorXd& x) const {
  return encoder_.forward(x);
}

Eigen::VectorXd PaTrainer::predict_logits(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = encoder_.forward(x);
  if (cfg_.classifier == ClassifierKind::learned) {
    return classifier_.logits(z);
  }
  if (!bank_source_.all_initialized()) {
    throw UninitializedPrototype(
        "source bank has uninitialized prototypes; cannot classify");
  }
  return prototype_logits(z, bank_source_.matrix(), cfg_.logit_scale);
}

PaLossBreakdown PaTrainer::losses_and_grad(const MixedBatch& batch,
                                           Eigen::VectorXd* grad,
                                           Eigen::MatrixXd* z_source,
                                           Eigen::MatrixXd* z_target) const {
  PaLossBreakdown out;

  std::span<double> g_enc, g_head, g_cls;
  Eigen::VectorXd head_tmp;
  if (grad != nullptr) {
    grad->setZero(static_cast<Eigen::Index>(param_count()));
    std::span<double> gs(grad->data(), static_cast<std::size_t>(grad->size()));
    g_enc = gs.subspan(0, encoder_.param_count());
    g_head = gs.subspan(encoder_.param_count(), head_.param_count());
    if (cfg_.classifier == ClassifierKind::learned) {
      g_cls = gs.subspan(encoder_.param_count() + head_.param_count());
    }
    head_tmp.resize(static_cast<Eigen::Index>(head_.param_count()));
  }

  auto process = [&](const Eigen::MatrixXd& x, const std::vector<int>& y,
                     Domain domain, Eigen::MatrixXd* z_cache, double lambda_c,
                     double lambda_cls, double& lc_sum, double& lcls_sum) {
    const Eigen::Index n = x.rows();
    if (static_cast<Eigen::Index>(y.size()) != n) {
      throw DimensionMismatch("batch and labels disagree");
    }
    if (z_cache != nullptr) {
      z_cache->resize(n, cfg_.embed_dim);
    }
    const PrototypeBank& own_bank =
        domain == Domain::source ? bank_source_ : bank_target_;

    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd xi = x.row(i).transpose();
      const Eigen::VectorXd z = encoder_.forward(xi);
      if (z_cache != nullptr) {
        z_cache->row(i) = z.transpose();
      }
      const std::string& class_id =
          classes_.at(static_cast<std::size_t>(y[static_cast<std::size_t>(i)]));

      Eigen::VectorXd gz = Eigen::VectorXd::Zero(cfg_.embed_dim);
      bool any_grad = false;

      // In-domain contrastive pull toward the own-domain prototype.
      const auto own_idx = own_bank.index_of(class_id);
      if (own_idx && own_bank.initialized(*own_idx)) {
        if (grad != nullptr && lambda_c != 0.0) {
          std::span<double> head_span;
          if (head_.param_count() > 0) {
            head_tmp.setZero();
            head_span = std::span<double>(
                head_tmp.data(), static_cast<std::size_t>(head_tmp.size()));
          }
          const InDomainGrad r = indomain_contrastive_loss_with_grad(
              z, class_id, own_bank, head_, cfg_.tau, head_span);
          lc_sum += r.loss;
          gz += lambda_c * r.grad_z;
          any_grad = true;
          if (!head_span.empty()) {
            for (std::size_t k = 0; k < g_head.size(); ++k) {
              g_head[k] += lambda_c * head_tmp[static_cast<Eigen::Index>(k)];
            }
          }
        } else {
          lc_sum +=
              indomain_contrastive_loss(z, class_id, own_bank, head_, cfg_.tau);
        }
      } else {
        ++out.skipped_terms;
      }

      // Dual-domain classification.
      if (cfg_.classifier == ClassifierKind::learned) {
        const int label = y[static_cast<std::size_t>(i)];
        const Eigen::VectorXd logits = classifier_.logits(z);
        double cls_loss = cross_entropy_with_logits(logits, label);
        Eigen::VectorXd gz_cls;
        if (grad != nullptr && lambda_cls != 0.0) {
          const Eigen::VectorXd gl =
              lambda_cls * cross_entropy_grad(logits, label);
          gz_cls = classifier_.backward(z, gl, g_cls);
        }
        const auto tgt_idx = bank_target_.index_of(class_id);
        if (cfg_.extra_cls && tgt_idx) {
          if (bank_target_.initialized(*tgt_idx)) {
            const BankCeGrad r = bank_cross_entropy_with_grad(
                z, class_id, bank_target_, cfg_.logit_scale);
            cls_loss += r.loss;
            if (grad != nullptr && lambda_cls != 0.0) {
              gz_cls += lambda_cls * r.grad_z;
            }
          } else {
            ++out.skipped_terms;
          }
        }
        lcls_sum += cls_loss;
        if (gz_cls.size() > 0) {
          gz += gz_cls;
          any_grad = true;
        }
      } else {
        const auto src_idx = bank_source_.index_of(class_id);
        if (src_idx && bank_source_.initialized(*src_idx)) {
          const auto tgt_idx = bank_target_.index_of(class_id);
          const bool with_target =
              cfg_.extra_cls && tgt_idx && bank_target_.initialized(*tgt_idx);
          if (cfg_.extra_cls && tgt_idx && !with_target) {
            ++out.skipped_terms;
          }
          const DualDomainGrad r = dual_domain_cls_loss_with_grad(
              z, class_id, bank_source_, bank_target_, cfg_.logit_scale,
              with_target);
          lcls_sum += r.loss;
          if (grad != nullptr && lambda_cls != 0.0) {
            gz += lambda_cls * r.grad_z;
            any_grad = true;
          }
        } else {
          ++out.skipped_terms;
        }
      }

      if (grad != nullptr && any_grad) {
        encoder_.backward(xi, gz, g_enc);
      }
    }
  };

  process(batch.x_source, batch.y_source, Domain::source, z_source,
          cfg_.lambda_c_source, cfg_.lambda_cls_source, out.lc_source,
          out.lcls_source);
  process(batch.x_target, batch.y_target, Domain::target, z_target,
          cfg_.lambda_c_target, cfg_.lambda_cls_target, out.lc_target,
          out.lcls_target);

  out.total = cfg_.lambda_c_source * out.lc_source +
              cfg_.lambda_c_target * out.lc_target +
              cfg_.lambda_cls_source * out.lcls_source +
              cfg_.lambda_cls_target * out.lcls_target;
  return out;
}

PaLossBreakdown PaTrainer::eval_losses(const MixedBatch& batch) const {
  return losses_and_grad(batch, nullptr, nullptr, nullptr);
}

PaLossBreakdown PaTrainer::step(const MixedBatch& batch) {
  if (batch.x_source.rows() == 0 && batch.x_target.rows() == 0) {
    throw InvalidConfig("training step needs a non-empty batch");
  }
  Eigen::VectorXd grad;
  Eigen::MatrixXd z_source, z_target;
  const PaLossBreakdown losses =
      losses_and_grad(batch, &grad, &z_source, &z_target);

  Eigen::VectorXd theta = params();
  opt_.step(theta, grad);
  set_params(theta);

  // Banks absorb this step's embeddings after the parameter update.
  for (Eigen::Index i = 0; i < z_source.rows(); ++i) {
    const auto idx = *bank_source_.index_of(
        classes_.at(static_cast<std::size_t>(batch.y_source[static_cast<std::size_t>(i)])));
    bank_source_.update(idx, z_source.row(i).transpose(), cfg_.momentum);
  }
  for (Eigen::Index i = 0; i < z_target.rows(); ++i) {
    const auto& class_id =
        classes_.at(static_cast<std::size_t>(batch.y_target[static_cast<std::size_t>(i)]));
    const auto idx = bank_target_.index_of(class_id);
    if (!idx) {
      throw UnseenPhotoLeak("photo sample of unseen class '" + class_id +
                            "' reached training");
    }
    bank_target_.update(*idx, z_target.row(i).transpose(), cfg_.momentum);
  }

  ++iteration_;
  return losses;
}

MixedBatch PaTrainer::sample_batch(const PaDataset& data,
                                   std::int64_t iteration) const {
  Rng rng(derive_seed(cfg_.seed, "pa-batch",
                      static_cast<std::uint64_t>(iteration)));
  MixedBatch batch;
  const auto draw = [&rng](const DomainData& pool, int count,
                           Eigen::MatrixXd& x, std::vector<int>& y) {
    if (pool.size() == 0 || count == 0) {
      x.resize(0, pool.x.cols());
      return;
    }
    x.resize(count, pool.x.cols());
    y.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const auto pick = static_cast<Eigen::Index>(
          rng.below(static_cast<std::uint64_t>(pool.size())));
      x.row(i) = pool.x.row(pick);
      y[static_cast<std::size_t>(i)] = pool.labels[static_cast<std::size_t>(pick)];
    }
  };
  draw(data.source, cfg_.batch_source, batch.x_source, batch.y_source);
  draw(data.target, cfg_.batch_target, batch.x_target, batch.y_target);
  return batch;
}

void PaTrainer::train(
    const PaDataset& data,
    const std::function<void(std::int64_t, const PaLossBreakdown&)>& log_sink) {
  for (int it = 0; it < cfg_.iterations; ++it) {
    const MixedBatch batch = sample_batch(data, iteration_);
    const PaLossBreakdown losses = step(batch);
    if (log_sink && (iteration_ % std::max(1, cfg_.log_every) == 0 ||
                     it + 1 == cfg_.iterations)) {
      log_sink(iteration_, losses);
    }
  }
}

DifferentiableLoss PaTrainer::make_loss(MixedBatch batch) const {
  auto self = std::make_shared<PaTrainer>(*this);
  auto b = std::make_shared<MixedBatch>(std::move(batch));
  DifferentiableLoss loss;
  loss.value = [self, b](const Eigen::VectorXd& theta) {
    self->set_params(theta);
    return self->eval_losses(*b).total;
  };
  loss.gradient = [self, b](const Eigen::VectorXd& theta) {
    self->set_params(theta);
    Eigen::VectorXd grad;
    self->losses_and_grad(*b, &grad, nullptr, nullptr);
    return grad;
  };
  return loss;
}

namespace {
std::vector<double> span_to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}
}  // namespace

nlohmann::json PaTrainer::to_checkpoint() const {
  Eigen::VectorXd enc(static_cast<Eigen::Index>(encoder_.param_count()));
  encoder_.get_params({enc.data(), static_cast<std::size_t>(enc.size())});
  Eigen::VectorXd head(static_cast<Eigen::Index>(head_.param_count()));
  head_.get_params({head.data(), static_cast<std::size_t>(head.size())});
  Eigen::VectorXd cls(static_cast<Eigen::Index>(classifier_.param_count()));
  classifier_.get_params({cls.data(), static_cast<std::size_t>(cls.size())});

  return {{"format", "gzsl-pa-checkpoint"},
          {"version", 1},
          {"iteration", iteration_},
          {"config", cfg_.to_json()},
          {"encoder_params", span_to_vec(enc)},
          {"head_params", span_to_vec(head)},
          {"classifier_params", span_to_vec(cls)},
          {"banks",
           {{"source", bank_source_.to_json()},
            {"target", bank_target_.to_json()}}},
          {"optimizer", opt_.to_json()}};
}

PaTrainer PaTrainer::from_checkpoint(const nlohmann::json& j) {
  if (j.value("format", "") != "gzsl-pa-checkpoint") {
    throw InvalidRecord("not a prototype-alignment checkpoint");
  }
  if (j.value("version", 0) != 1) {
    throw InvalidRecord("unsupported checkpoint version");
  }
  const PaConfig cfg = PaConfig::from_json(j.at("config"));
  PrototypeBank source = PrototypeBank::from_json(j.at("banks").at("source"));
  PrototypeBank target = PrototypeBank::from_json(j.at("banks").at("target"));

  PaTrainer trainer(cfg, source.classes(), target.classes());
  trainer.bank_source_ = std::move(source);
  trainer.bank_target_ = std::move(target);

  const auto enc = j.at("encoder_params").get<std::vector<double>>();
  const auto head = j.at("head_params").get<std::vector<double>>();
  const auto cls = j.at("classifier_params").get<std::vector<double>>();
  if (enc.size() != trainer.encoder_.param_count() ||
      head.size() != trainer.head_.param_count() ||
      cls.size() != trainer.classifier_.param_count()) {
    throw DimensionMismatch("checkpoint parameter sizes do not match config");
  }
  trainer.encoder_.set_params(enc);
  trainer.head_.set_params(head);
  trainer.classifier_.set_params(cls);
  trainer.opt_ = Adam::from_json(j.at("optimizer"));
  trainer.iteration_ = j.at("iteration").get<std::int64_t>();
  return trainer;
}

void PaTrainer::save_checkpoint(const std::filesystem::path& path) const {
  write_json_file(path, to_checkpoint());
}

PaTrainer PaTrainer::load_checkpoint(const std::filesystem::path& path) {
  return from_checkpoint(read_json_file(path));
}

}  // namespace gzsl
