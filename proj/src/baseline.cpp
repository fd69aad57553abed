// SPDX-License-Identifier: Apache-2.0
#include "gzsl/baseline.hpp"

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"
#include "gzsl/rng.hpp"

namespace gzsl {

void BaselineConfig::validate() const {
  if (hidden_dim <= 0 || embed_dim <= 0) {
    throw InvalidConfig("encoder dims must be positive");
  }
  if (!(lr > 0.0) || batch_size < 1 || iterations < 0) {
    throw InvalidConfig("invalid baseline optimization settings");
  }
}

nlohmann::json BaselineConfig::to_json() const {
  return {{"input_dim", input_dim}, {"hidden_dim", hidden_dim},
          {"embed_dim", embed_dim}, {"lr", lr},
          {"batch_size", batch_size}, {"iterations", iterations},
          {"seed", seed}};
}

BaselineConfig BaselineConfig::from_json(const nlohmann::json& j) {
  BaselineConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.lr = j.value("lr", c.lr);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.iterations = j.value("iterations", c.iterations);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

SupervisedBaseline::SupervisedBaseline(BaselineConfig cfg, int num_classes)
    : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.input_dim <= 0) {
    throw InvalidConfig("input_dim must be resolved before construction");
  }
  encoder_ = MlpEncoder(cfg_.input_dim, cfg_.hidden_dim, cfg_.embed_dim,
                        /*normalize_output=*/false);
  classifier_ = LinearClassifier(cfg_.embed_dim, num_classes);
  Rng rng(derive_seed(cfg_.seed, "baseline-init"));
  encoder_.init_params(rng);
  classifier_.init_params(rng);

  const auto n = static_cast<Eigen::Index>(encoder_.param_count() +
                                           classifier_.param_count());
  opt_ = Adam(n, cfg_.lr, Eigen::VectorXd::Ones(n));
}

double SupervisedBaseline::step(const Eigen::MatrixXd& x,
                                const std::vector<int>& labels) {
  const Eigen::Index n = x.rows();
  if (n == 0 || static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionMismatch("batch and labels disagree");
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(encoder_.param_count() +
                                classifier_.param_count()));
  std::span<double> gs(grad.data(), static_cast<std::size_t>(grad.size()));
  auto g_enc = gs.subspan(0, encoder_.param_count());
  auto g_cls = gs.subspan(encoder_.param_count());

  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    const Eigen::VectorXd z = encoder_.forward(xi);
    const Eigen::VectorXd logits = classifier_.logits(z);
    const int label = labels[static_cast<std::size_t>(i)];
    loss += cross_entropy_with_logits(logits, label) * inv_n;
    const Eigen::VectorXd gl = inv_n * cross_entropy_grad(logits, label);
    const Eigen::VectorXd gz = classifier_.backward(z, gl, g_cls);
    encoder_.backward(xi, gz, g_enc);
  }

  Eigen::VectorXd theta(grad.size());
  std::span<double> ts(theta.data(), static_cast<std::size_t>(theta.size()));
  encoder_.get_params(ts.subspan(0, encoder_.param_count()));
  classifier_.get_params(ts.subspan(encoder_.param_count()));
  opt_.step(theta, grad);
  std::span<const double> cts(theta.data(),
                              static_cast<std::size_t>(theta.size()));
  encoder_.set_params(cts.subspan(0, encoder_.param_count()));
  classifier_.set_params(cts.subspan(encoder_.param_count()));
  ++iteration_;
  return loss;
}

void SupervisedBaseline::train(const DomainData& train_data) {
  if (train_data.size() == 0) {
    throw EmptyClassList("baseline training data is empty");
  }
  Eigen::MatrixXd x(cfg_.batch_size, train_data.x.cols());
  std::vector<int> labels(static_cast<std::size_t>(cfg_.batch_size));
  for (int it = 0; it < cfg_.iterations; ++it) {
    Rng rng(derive_seed(cfg_.seed, "baseline-batch",
                        static_cast<std::uint64_t>(iteration_)));
    for (int i = 0; i < cfg_.batch_size; ++i) {
      const auto pick = static_cast<Eigen::Index>(
          rng.below(static_cast<std::uint64_t>(train_data.size())));
      x.row(i) = train_data.x.row(pick);
      labels[static_cast<std::size_t>(i)] =
          train_data.labels[static_cast<std::size_t>(pick)];
    }
    step(x, labels);
  }
}

Eigen::VectorXd SupervisedBaseline::predict_logits(
    const Eigen::VectorXd& x) const {
  return classifier_.logits(encoder_.forward(x));
}

}  // namespace gzsl
