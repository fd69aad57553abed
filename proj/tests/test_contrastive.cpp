// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "gzsl/ce_trainer.hpp"
#include "gzsl/descriptors.hpp"
#include "gzsl/errors.hpp"
#include "gzsl/gradcheck.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/linalg.hpp"
#include "gzsl/supcon.hpp"
#include "gzsl/synthetic.hpp"
#include "test_util.hpp"

using namespace gzsl;

namespace {

// Test double: fixed linear map, optionally normalized, no parameters.
class LinearEncoder final : public EncoderContract {
 public:
  explicit LinearEncoder(Eigen::MatrixXd m, bool normalize = false)
      : m_(std::move(m)), normalize_(normalize) {}

  int input_dim() const override { return static_cast<int>(m_.cols()); }
  int output_dim() const override { return static_cast<int>(m_.rows()); }
  std::size_t param_count() const override { return 0; }
  void get_params(std::span<double>) const override {}
  void set_params(std::span<const double>) override {}
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd y = m_ * x;
    return normalize_ ? l2_normalize(y) : y;
  }
  Eigen::VectorXd backward(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& grad_z,
                           std::span<double>) const override {
    if (!normalize_) {
      return m_.transpose() * grad_z;
    }
    return m_.transpose() * l2_normalize_backward(m_ * x, grad_z);
  }

 private:
  Eigen::MatrixXd m_;
  bool normalize_;
};

Eigen::MatrixXd random_unit_batch(Rng& rng, int n, int dim) {
  Eigen::MatrixXd z(n, dim);
  for (int i = 0; i < n; ++i) {
    z.row(i) = testutil::random_unit(rng, dim).transpose();
  }
  return z;
}

}  // namespace

TEST_CASE("supcon closed form: a duplicated pair has zero loss") {
  Rng rng(1);
  const Eigen::VectorXd u = testutil::random_unit(rng, 8);
  Eigen::MatrixXd z(2, 8);
  z.row(0) = u.transpose();
  z.row(1) = u.transpose();
  // Single positive is also the whole denominator: -log(e^10 / e^10) = 0.
  CHECK(supcon_loss(z, {3, 3}, 0.1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("supcon rejects unusable batches") {
  Rng rng(2);
  const Eigen::MatrixXd z = random_unit_batch(rng, 4, 6);
  CHECK_THROWS_AS(supcon_loss(z, {0, 1, 2, 3}, 0.1), NoPositivePairs);
  CHECK_THROWS_AS(supcon_loss(z, {0, 0, 1, 1}, 0.0), InvalidConfig);
  CHECK_THROWS_AS(supcon_loss(z.topRows(1), {0}, 0.1), InvalidConfig);

  Eigen::MatrixXd bad = z;
  bad.row(0) *= 2.0;
  CHECK_THROWS_AS(supcon_loss(bad, {0, 0, 1, 1}, 0.1), NonUnitInput);
}

TEST_CASE("supcon is non-negative and permutation invariant") {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd z = random_unit_batch(rng, n, 8);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) {
      l = static_cast<int>(rng.below(3));
    }
    labels[0] = labels[1] = 0;  // guarantee a positive pair

    const double base = supcon_loss(z, labels, 0.1);
    CHECK(base >= -1e-12);

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Eigen::MatrixXd zp(n, 8);
    std::vector<int> lp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      zp.row(i) = z.row(perm[static_cast<std::size_t>(i)]);
      lp[static_cast<std::size_t>(i)] =
          labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    CHECK(supcon_loss(zp, lp, 0.1) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("anchors without positives are skipped, not fatal") {
  Rng rng(4);
  Eigen::MatrixXd z = random_unit_batch(rng, 3, 6);
  z.row(1) = z.row(0);
  // Sample 2 is alone in its class; only samples 0 and 1 anchor.
  const SupConResult r = supcon_loss_with_grad(z, {0, 0, 7}, 0.1);
  CHECK(r.active_anchors == 2);
  CHECK(std::isfinite(r.loss));
}

TEST_CASE("supcon gradient matches finite differences through normalization") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const int n = 6, dim = 8;
    const std::vector<int> labels = {0, 0, 1, 1, 2, 2};
    const Eigen::VectorXd theta0 =
        rng.normal_vector(n * dim);  // raw (pre-normalization) embeddings

    const auto unpack = [n, dim](const Eigen::VectorXd& theta) {
      Eigen::MatrixXd raw(n, dim);
      for (int i = 0; i < n; ++i) {
        raw.row(i) = theta.segment(i * dim, dim).transpose();
      }
      return raw;
    };
    DifferentiableLoss loss;
    loss.value = [&, labels](const Eigen::VectorXd& theta) {
      const Eigen::MatrixXd raw = unpack(theta);
      Eigen::MatrixXd z(n, dim);
      for (int i = 0; i < n; ++i) {
        z.row(i) = l2_normalize(raw.row(i).transpose()).transpose();
      }
      return supcon_loss(z, labels, 0.1);
    };
    loss.gradient = [&, labels](const Eigen::VectorXd& theta) {
      const Eigen::MatrixXd raw = unpack(theta);
      Eigen::MatrixXd z(n, dim);
      for (int i = 0; i < n; ++i) {
        z.row(i) = l2_normalize(raw.row(i).transpose()).transpose();
      }
      const SupConResult r = supcon_loss_with_grad(z, labels, 0.1);
      Eigen::VectorXd grad(n * dim);
      for (int i = 0; i < n; ++i) {
        grad.segment(i * dim, dim) = l2_normalize_backward(
            raw.row(i).transpose(), r.grad.row(i).transpose());
      }
      return grad;
    };
    CHECK(finite_difference_check(loss, theta0, 10, 500 + seed) < 1e-4);
  }
}

TEST_CASE("combined classification + contrastive gradient through the encoder") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CeConfig cfg;
    cfg.input_dim = 8;
    cfg.hidden_dim = 10;
    cfg.embed_dim = 8;
    cfg.head = seed % 2 == 0 ? HeadKind::mlp : HeadKind::identity;
    cfg.head_hidden = 6;
    cfg.seed = 10 + seed;
    CeTrainer trainer(cfg, 3);

    Rng rng(200 + seed);
    const Eigen::MatrixXd x = rng.normal_matrix(6, 8);
    const std::vector<int> labels = {0, 0, 1, 1, 2, 2};
    const DifferentiableLoss loss = trainer.make_loss(x, labels);
    CHECK(finite_difference_check(loss, trainer.params(), 10, 700 + seed) <
          1e-4);
  }
}

TEST_CASE("zero classifier gives ln K classification loss") {
  CeConfig cfg;
  cfg.input_dim = 6;
  cfg.embed_dim = 4;
  cfg.head = HeadKind::identity;
  cfg.seed = 5;
  const int k = 10;
  CeTrainer trainer(cfg, k);

  // Zero out the classifier segment (weights and bias).
  Eigen::VectorXd theta = trainer.params();
  const auto cls_offset = static_cast<Eigen::Index>(
      trainer.encoder().param_count());
  theta.tail(theta.size() - cls_offset).setZero();
  trainer.set_params(theta);

  Rng rng(6);
  Eigen::MatrixXd x(2 * k, 6);
  std::vector<int> labels;
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd v = rng.normal_vector(6);
    x.row(2 * c) = v.transpose();
    x.row(2 * c + 1) = v.transpose();
    labels.push_back(c);
    labels.push_back(c);
  }
  const CeStepLosses losses = trainer.eval_losses(x, labels);
  CHECK(losses.cls == doctest::Approx(std::log(static_cast<double>(k)))
                          .epsilon(1e-12));
}

TEST_CASE("a saturated correct classifier drives the loss to zero") {
  CeConfig cfg;
  cfg.input_dim = 6;
  cfg.embed_dim = 4;
  cfg.head = HeadKind::identity;
  cfg.seed = 7;
  CeTrainer trainer(cfg, 2);

  Rng rng(8);
  const Eigen::VectorXd x0 = rng.normal_vector(6);
  const Eigen::VectorXd x1 = rng.normal_vector(6);
  Eigen::MatrixXd x(4, 6);
  x.row(0) = x0.transpose();
  x.row(1) = x0.transpose();
  x.row(2) = x1.transpose();
  x.row(3) = x1.transpose();
  const std::vector<int> labels = {0, 0, 1, 1};

  const Eigen::VectorXd z0 = trainer.encoder().forward(x0);
  const Eigen::VectorXd z1 = trainer.encoder().forward(x1);
  const double cosine = z0.dot(z1);
  REQUIRE(cosine < 0.999);
  const double alpha = 50.0 / (1.0 - cosine);

  // Classifier rows aligned with each class embedding, scaled to saturation.
  Eigen::VectorXd theta = trainer.params();
  const auto off =
      static_cast<Eigen::Index>(trainer.encoder().param_count());
  for (int j = 0; j < 4; ++j) {  // column-major 2x4 weight
    theta[off + 2 * j + 0] = alpha * z0[j];
    theta[off + 2 * j + 1] = alpha * z1[j];
  }
  theta[off + 8] = 0.0;
  theta[off + 9] = 0.0;
  trainer.set_params(theta);

  CHECK(trainer.eval_losses(x, labels).cls < 1e-9);
}

TEST_CASE("200 training steps halve the combined loss on 10 synthetic classes") {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.latent_dim = 8;
  spec.obs_dim = 16;
  spec.seen_fraction = 0.5;
  spec.source_train_per_class = 20;
  spec.seed = 77;
  const SyntheticData data = generate_synthetic(spec);

  LabeledVectors illustrations;
  illustrations.classes = data.classes;
  illustrations.data = data.source_train;

  CeConfig cfg;
  cfg.input_dim = 16;
  cfg.hidden_dim = 32;
  cfg.embed_dim = 8;
  cfg.head = HeadKind::mlp;
  cfg.head_hidden = 16;
  cfg.lr = 3e-3;
  cfg.iterations = 200;
  cfg.batch_classes = 5;
  cfg.samples_per_class = 2;
  cfg.seed = 99;
  CeTrainer trainer(cfg, static_cast<int>(data.classes.size()));

  // Fixed probe batch, evaluated before and after training.
  Eigen::MatrixXd probe_x;
  std::vector<int> probe_labels;
  trainer.sample_batch(illustrations, 0, probe_x, probe_labels);
  const double before = trainer.eval_losses(probe_x, probe_labels).total();

  trainer.train(illustrations);
  const double after = trainer.eval_losses(probe_x, probe_labels).total();
  CHECK(trainer.iteration() == 200);
  CHECK(after < 0.5 * before);
}

TEST_CASE("class descriptors from a fixed encoder") {
  const LinearEncoder enc(Eigen::MatrixXd::Identity(2, 2));

  std::map<std::string, std::vector<Eigen::VectorXd>> samples;
  samples["x"] = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
  samples["y"] = {Eigen::Vector2d(0.0, 1.0)};
  const auto descriptors = class_descriptors(enc, samples);
  REQUIRE(descriptors.size() == 2);
  CHECK(descriptors[0].class_id == "x");
  CHECK(descriptors[0].phi[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(descriptors[0].phi[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  // Single unit sample: normalization leaves it unchanged.
  CHECK(descriptors[1].phi[1] == doctest::Approx(1.0));

  samples["z"] = {};
  CHECK_THROWS_AS(class_descriptors(enc, samples), EmptyClass);

  std::map<std::string, std::vector<Eigen::VectorXd>> degenerate;
  degenerate["w"] = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(-1.0, 0.0)};
  CHECK_THROWS_AS(class_descriptors(enc, degenerate), DegenerateVector);
}

TEST_CASE("descriptors are invariant to duplication and ordering") {
  Rng rng(9);
  const LinearEncoder enc(rng.normal_matrix(4, 4));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::VectorXd> samples;
    const int n = 2 + static_cast<int>(rng.below(4));
    for (int i = 0; i < n; ++i) {
      samples.push_back(rng.normal_vector(4));
    }
    std::map<std::string, std::vector<Eigen::VectorXd>> once{{"c", samples}};

    std::vector<Eigen::VectorXd> doubled = samples;
    doubled.insert(doubled.end(), samples.begin(), samples.end());
    std::map<std::string, std::vector<Eigen::VectorXd>> twice{{"c", doubled}};

    std::vector<Eigen::VectorXd> shuffled = samples;
    rng.shuffle(shuffled);
    std::map<std::string, std::vector<Eigen::VectorXd>> reordered{
        {"c", shuffled}};

    const auto a = class_descriptors(enc, once);
    const auto b = class_descriptors(enc, twice);
    const auto c = class_descriptors(enc, reordered);
    CHECK(std::abs(a[0].phi.norm() - 1.0) < 1e-9);
    CHECK((a[0].phi - b[0].phi).norm() < 1e-9);
    CHECK((a[0].phi - c[0].phi).norm() < 1e-9);
  }
}

TEST_CASE("descriptor files round-trip for 196 classes") {
  Rng rng(10);
  std::vector<ClassDescriptor> descriptors;
  for (int i = 0; i < 196; ++i) {
    descriptors.push_back(
        {"class_" + std::to_string(i), testutil::random_unit(rng, 16)});
  }
  const auto dir = std::filesystem::temp_directory_path() / "gzsl_desc_test";
  std::filesystem::create_directories(dir);

  export_descriptors_text(descriptors, dir / "d.csv");
  const auto text = import_descriptors_text(dir / "d.csv");
  REQUIRE(text.size() == descriptors.size());
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    CHECK(text[i].class_id == descriptors[i].class_id);
    // Shortest round-trip formatting reproduces the doubles exactly.
    CHECK((text[i].phi - descriptors[i].phi).cwiseAbs().maxCoeff() == 0.0);
  }

  export_descriptors_binary(descriptors, dir / "d.bin");
  const auto bin = import_descriptors_binary(dir / "d.bin");
  REQUIRE(bin.size() == descriptors.size());
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    CHECK(bin[i].class_id == descriptors[i].class_id);
    CHECK((bin[i].phi - descriptors[i].phi).cwiseAbs().maxCoeff() < 1e-7);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("descriptor import rejects mixed dimensions") {
  const auto dir = std::filesystem::temp_directory_path() / "gzsl_desc_bad";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "bad.csv",
                  "class_id,dim\na,0.5,0.5\nb,1.0,0.0,0.0\n");
  CHECK_THROWS_AS(import_descriptors_text(dir / "bad.csv"), DimensionMismatch);

  write_text_file(dir / "noheader.csv", "a,0.5,0.5\n");
  CHECK_THROWS_AS(import_descriptors_text(dir / "noheader.csv"),
                  InvalidRecord);

  Rng rng(11);
  std::vector<ClassDescriptor> mixed = {
      {"a", testutil::random_unit(rng, 3)},
      {"b", testutil::random_unit(rng, 4)}};
  CHECK_THROWS_AS(export_descriptors_text(mixed, dir / "x.csv"),
                  DimensionMismatch);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ce training is deterministic for a fixed seed") {
  SyntheticSpec spec;
  spec.num_classes = 6;
  spec.latent_dim = 4;
  spec.obs_dim = 8;
  spec.seen_fraction = 0.5;
  spec.source_train_per_class = 6;
  spec.seed = 3;
  const SyntheticData data = generate_synthetic(spec);
  LabeledVectors illustrations;
  illustrations.classes = data.classes;
  illustrations.data = data.source_train;

  CeConfig cfg;
  cfg.input_dim = 8;
  cfg.embed_dim = 4;
  cfg.iterations = 30;
  cfg.batch_classes = 3;
  cfg.seed = 12;

  const auto run = [&]() {
    CeTrainer trainer(cfg, static_cast<int>(data.classes.size()));
    trainer.train(illustrations);
    return trainer.descriptors(illustrations);
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].phi - b[i].phi).cwiseAbs().maxCoeff() == 0.0);
  }
}
