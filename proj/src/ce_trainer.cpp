// SPDX-License-Identifier: Apache-2.0
#include "gzsl/ce_trainer.hpp"

#include <algorithm>
#include <memory>
#include <string>

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"
#include "gzsl/rng.hpp"
#include "gzsl/supcon.hpp"

namespace gzsl {

void CeConfig::validate() const {
  if (hidden_dim <= 0 || embed_dim <= 0) {
    throw InvalidConfig("encoder dims must be positive");
  }
  if (!(tau > 0.0)) {
    throw InvalidConfig("tau must be positive");
  }
  if (!(lr > 0.0)) {
    throw InvalidConfig("lr must be positive");
  }
  if (batch_classes < 1 || samples_per_class < 1) {
    throw InvalidConfig("batch composition must be positive");
  }
  if (iterations < 0) {
    throw InvalidConfig("iterations must be non-negative");
  }
}

nlohmann::json CeConfig::to_json() const {
  return {{"input_dim", input_dim},
          {"hidden_dim", hidden_dim},
          {"embed_dim", embed_dim},
          {"encoder_normalize", encoder_normalize},
          {"head", to_string(head)},
          {"head_hidden", head_hidden},
          {"tau", tau},
          {"lr", lr},
          {"backbone_lr_scale", backbone_lr_scale},
          {"batch_classes", batch_classes},
          {"samples_per_class", samples_per_class},
          {"iterations", iterations},
          {"log_every", log_every},
          {"seed", seed}};
}

CeConfig CeConfig::from_json(const nlohmann::json& j) {
  CeConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.encoder_normalize = j.value("encoder_normalize", c.encoder_normalize);
  if (j.contains("head")) {
    c.head = head_kind_from_string(j.at("head").get<std::string>());
  }
  c.head_hidden = j.value("head_hidden", c.head_hidden);
  c.tau = j.value("tau", c.tau);
  c.lr = j.value("lr", c.lr);
  c.backbone_lr_scale = j.value("backbone_lr_scale", c.backbone_lr_scale);
  c.batch_classes = j.value("batch_classes", c.batch_classes);
  c.samples_per_class = j.value("samples_per_class", c.samples_per_class);
  c.iterations = j.value("iterations", c.iterations);
  c.log_every = j.value("log_every", c.log_every);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

CeTrainer::CeTrainer(CeConfig cfg, int num_classes)
    : cfg_(cfg), num_classes_(num_classes) {
  cfg_.validate();
  if (cfg_.input_dim <= 0) {
    throw InvalidConfig("input_dim must be resolved before construction");
  }
  if (num_classes_ < 1) {
    throw EmptyClassList("trainer needs at least one class");
  }
  encoder_ = MlpEncoder(cfg_.input_dim, cfg_.hidden_dim, cfg_.embed_dim,
                        cfg_.encoder_normalize);
  head_ = cfg_.head == HeadKind::identity
              ? ProjectionHead::identity()
              : ProjectionHead::mlp(cfg_.embed_dim, cfg_.head_hidden,
                                    cfg_.embed_dim);
  classifier_ = LinearClassifier(cfg_.embed_dim, num_classes_);

  Rng rng(derive_seed(cfg_.seed, "ce-init"));
  encoder_.init_params(rng);
  head_.init_params(rng);
  classifier_.init_params(rng);

  const auto n = static_cast<Eigen::Index>(param_count());
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
  scales.head(static_cast<Eigen::Index>(encoder_.param_count()))
      .setConstant(cfg_.backbone_lr_scale);
  opt_ = Adam(n, cfg_.lr, std::move(scales));
}

std::size_t CeTrainer::param_count() const {
  return encoder_.param_count() + head_.param_count() +
         classifier_.param_count();
}

Eigen::VectorXd CeTrainer::params() const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(param_count()));
  std::span<double> s(theta.data(), static_cast<std::size_t>(theta.size()));
  encoder_.get_params(s.subspan(0, encoder_.param_count()));
  head_.get_params(s.subspan(encoder_.param_count(), head_.param_count()));
  classifier_.get_params(
      s.subspan(encoder_.param_count() + head_.param_count()));
  return theta;
}

void CeTrainer::set_params(const Eigen::VectorXd& theta) {
  if (theta.size() != static_cast<Eigen::Index>(param_count())) {
    throw DimensionMismatch("parameter vector size mismatch");
  }
  std::span<const double> s(theta.data(),
                            static_cast<std::size_t>(theta.size()));
  encoder_.set_params(s.subspan(0, encoder_.param_count()));
  head_.set_params(s.subspan(encoder_.param_count(), head_.param_count()));
  classifier_.set_params(
      s.subspan(encoder_.param_count() + head_.param_count()));
}

CeStepLosses CeTrainer::losses_and_grad(const Eigen::MatrixXd& x,
                                        const std::vector<int>& labels,
                                        Eigen::VectorXd* grad) const {
  const Eigen::Index n = x.rows();
  if (n == 0 || static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionMismatch("batch and labels disagree");
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd embeddings(n, cfg_.embed_dim);   // z-hat
  Eigen::MatrixXd projected(n, cfg_.embed_dim);    // eta(h(z-hat))
  double cls_loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd z = encoder_.forward(x.row(i).transpose());
    embeddings.row(i) = z.transpose();
    projected.row(i) = l2_normalize(head_.forward(z)).transpose();
    cls_loss += cross_entropy_with_logits(classifier_.logits(z), labels[i]);
  }
  cls_loss *= inv_n;

  CeStepLosses losses;
  losses.cls = cls_loss;

  if (grad == nullptr) {
    losses.cont = supcon_loss(projected, labels, cfg_.tau);
    return losses;
  }

  const SupConResult sup = supcon_loss_with_grad(projected, labels, cfg_.tau);
  losses.cont = sup.loss;

  grad->setZero(static_cast<Eigen::Index>(param_count()));
  std::span<double> gs(grad->data(), static_cast<std::size_t>(grad->size()));
  auto g_enc = gs.subspan(0, encoder_.param_count());
  auto g_head = gs.subspan(encoder_.param_count(), head_.param_count());
  auto g_cls = gs.subspan(encoder_.param_count() + head_.param_count());

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    const Eigen::VectorXd z = embeddings.row(i).transpose();

    // Classification branch.
    const Eigen::VectorXd glogits =
        inv_n * cross_entropy_grad(classifier_.logits(z), labels[i]);
    Eigen::VectorXd gz = classifier_.backward(z, glogits, g_cls);

    // Contrastive branch: supcon grad -> final normalization -> head.
    const Eigen::VectorXd hz = head_.forward(z);
    const Eigen::VectorXd gproj = sup.grad.row(i).transpose();
    gz += head_.backward(z, l2_normalize_backward(hz, gproj), g_head);

    encoder_.backward(xi, gz, g_enc);
  }
  return losses;
}

CeStepLosses CeTrainer::eval_losses(const Eigen::MatrixXd& x,
                                    const std::vector<int>& labels) const {
  return losses_and_grad(x, labels, nullptr);
}

CeStepLosses CeTrainer::step(const Eigen::MatrixXd& x,
                             const std::vector<int>& labels) {
  Eigen::VectorXd grad;
  const CeStepLosses losses = losses_and_grad(x, labels, &grad);
  Eigen::VectorXd theta = params();
  opt_.step(theta, grad);
  set_params(theta);
  ++iteration_;
  return losses;
}

void CeTrainer::sample_batch(const LabeledVectors& data, std::int64_t iteration,
                             Eigen::MatrixXd& x,
                             std::vector<int>& labels) const {
  const int k = static_cast<int>(data.classes.size());
  std::vector<std::vector<Eigen::Index>> by_class(
      static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < data.data.size(); ++i) {
    by_class[static_cast<std::size_t>(data.data.labels[i])].push_back(i);
  }
  std::vector<int> populated;
  for (int c = 0; c < k; ++c) {
    if (!by_class[static_cast<std::size_t>(c)].empty()) {
      populated.push_back(c);
    }
  }
  if (populated.empty()) {
    throw EmptyClassList("dataset has no samples");
  }

  Rng rng(derive_seed(cfg_.seed, "ce-batch",
                      static_cast<std::uint64_t>(iteration)));
  std::vector<int> chosen = populated;
  rng.shuffle(chosen);
  const int use = std::min<int>(cfg_.batch_classes,
                                static_cast<int>(chosen.size()));
  chosen.resize(static_cast<std::size_t>(use));

  const Eigen::Index batch =
      static_cast<Eigen::Index>(use) * cfg_.samples_per_class;
  x.resize(batch, data.data.x.cols());
  labels.assign(static_cast<std::size_t>(batch), 0);
  Eigen::Index row = 0;
  for (const int c : chosen) {
    const auto& pool = by_class[static_cast<std::size_t>(c)];
    for (int s = 0; s < cfg_.samples_per_class; ++s) {
      const auto pick = pool[static_cast<std::size_t>(rng.below(pool.size()))];
      x.row(row) = data.data.x.row(pick);
      labels[static_cast<std::size_t>(row)] = c;
      ++row;
    }
  }
}

void CeTrainer::train(
    const LabeledVectors& data,
    const std::function<void(std::int64_t, const CeStepLosses&)>& log_sink) {
  Eigen::MatrixXd x;
  std::vector<int> labels;
  for (int it = 0; it < cfg_.iterations; ++it) {
    sample_batch(data, iteration_, x, labels);
    const CeStepLosses losses = step(x, labels);
    if (log_sink && (iteration_ % std::max(1, cfg_.log_every) == 0 ||
                     it + 1 == cfg_.iterations)) {
      log_sink(iteration_, losses);
    }
  }
}

std::vector<ClassDescriptor> CeTrainer::descriptors(
    const LabeledVectors& data) const {
  return class_descriptors(encoder_, data);
}

DifferentiableLoss CeTrainer::make_loss(Eigen::MatrixXd x,
                                        std::vector<int> labels) const {
  auto self = std::make_shared<CeTrainer>(*this);
  auto batch_x = std::make_shared<Eigen::MatrixXd>(std::move(x));
  auto batch_y = std::make_shared<std::vector<int>>(std::move(labels));
  DifferentiableLoss loss;
  loss.value = [self, batch_x, batch_y](const Eigen::VectorXd& theta) {
    self->set_params(theta);
    const CeStepLosses l = self->eval_losses(*batch_x, *batch_y);
    return l.total();
  };
  loss.gradient = [self, batch_x, batch_y](const Eigen::VectorXd& theta) {
    self->set_params(theta);
    Eigen::VectorXd grad;
    self->losses_and_grad(*batch_x, *batch_y, &grad);
    return grad;
  };
  return loss;
}

}  // namespace gzsl
