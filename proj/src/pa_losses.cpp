// SPDX-License-Identifier: Apache-2.0
#include "gzsl/pa_losses.hpp"

#include <vector>

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"

namespace gzsl {

namespace {

int require_member(const PrototypeBank& bank, const std::string& class_id) {
  const auto idx = bank.index_of(class_id);
  if (!idx) {
    throw UnknownClass("class '" + class_id + "' is not in the " +
                       to_string(bank.domain()) + " bank");
  }
  if (!bank.initialized(*idx)) {
    throw UninitializedPrototype("class '" + class_id +
                                 "' has no prototype in the " +
                                 to_string(bank.domain()) + " bank");
  }
  return *idx;
}

}  // namespace

BankCeGrad bank_cross_entropy_with_grad(const Eigen::VectorXd& z,
                                        const std::string& class_id,
                                        const PrototypeBank& bank,
                                        double logit_scale) {
  const int label_index = require_member(bank, class_id);
  const std::vector<int> actives = bank.initialized_indices();

  Eigen::VectorXd logits(static_cast<Eigen::Index>(actives.size()));
  int pos = -1;
  for (std::size_t k = 0; k < actives.size(); ++k) {
    logits[static_cast<Eigen::Index>(k)] =
        logit_scale * z.dot(bank.prototype(actives[k]));
    if (actives[k] == label_index) {
      pos = static_cast<int>(k);
    }
  }

  BankCeGrad out;
  out.loss = cross_entropy_with_logits(logits, pos);
  const Eigen::VectorXd g = cross_entropy_grad(logits, pos);
  out.grad_z = Eigen::VectorXd::Zero(z.size());
  for (std::size_t k = 0; k < actives.size(); ++k) {
    out.grad_z += logit_scale * g[static_cast<Eigen::Index>(k)] *
                  bank.prototype(actives[k]);
  }
  return out;
}

double indomain_contrastive_loss(const Eigen::VectorXd& z,
                                 const std::string& class_id,
                                 const PrototypeBank& bank,
                                 const ProjectionHead& head, double tau) {
  return indomain_contrastive_loss_with_grad(z, class_id, bank, head, tau, {})
      .loss;
}

InDomainGrad indomain_contrastive_loss_with_grad(
    const Eigen::VectorXd& z, const std::string& class_id,
    const PrototypeBank& bank, const ProjectionHead& head, double tau,
    std::span<double> head_grad) {
  if (!(tau > 0.0)) {
    throw InvalidConfig("temperature must be positive");
  }
  const int label_index = require_member(bank, class_id);
  const std::vector<int> actives = bank.initialized_indices();

  const Eigen::VectorXd hz = head.forward(z);
  std::vector<Eigen::VectorXd> hphi(actives.size());
  Eigen::VectorXd logits(static_cast<Eigen::Index>(actives.size()));
  int pos = -1;
  for (std::size_t k = 0; k < actives.size(); ++k) {
    hphi[k] = head.forward(bank.prototype(actives[k]));
    logits[static_cast<Eigen::Index>(k)] = hz.dot(hphi[k]) / tau;
    if (actives[k] == label_index) {
      pos = static_cast<int>(k);
    }
  }

  InDomainGrad out;
  out.loss = cross_entropy_with_logits(logits, pos);

  const Eigen::VectorXd g = cross_entropy_grad(logits, pos);
  Eigen::VectorXd g_hz = Eigen::VectorXd::Zero(hz.size());
  for (std::size_t k = 0; k < actives.size(); ++k) {
    g_hz += g[static_cast<Eigen::Index>(k)] * hphi[k];
  }
  g_hz /= tau;
  out.grad_z = head.backward(z, g_hz, head_grad);

  // The prototypes also pass through h; their head-parameter gradients count,
  // their input gradients do not (bank entries are constants).
  if (!head_grad.empty() && head.param_count() > 0) {
    for (std::size_t k = 0; k < actives.size(); ++k) {
      const Eigen::VectorXd g_hphi =
          (g[static_cast<Eigen::Index>(k)] / tau) * hz;
      head.backward(bank.prototype(actives[k]), g_hphi, head_grad);
    }
  }
  return out;
}

double dual_domain_cls_loss(const Eigen::VectorXd& z,
                            const std::string& class_id,
                            const PrototypeBank& bank_source,
                            const PrototypeBank& bank_target,
                            double logit_scale) {
  return dual_domain_cls_loss_with_grad(z, class_id, bank_source, bank_target,
                                        logit_scale)
      .loss;
}

DualDomainGrad dual_domain_cls_loss_with_grad(const Eigen::VectorXd& z,
                                              const std::string& class_id,
                                              const PrototypeBank& bank_source,
                                              const PrototypeBank& bank_target,
                                              double logit_scale,
                                              bool include_target_term) {
  DualDomainGrad out;
  const BankCeGrad src =
      bank_cross_entropy_with_grad(z, class_id, bank_source, logit_scale);
  out.loss = src.loss;
  out.grad_z = src.grad_z;

  // The second term exists only for seen classes (the target bank has no slot
  // for unseen ones).
  if (include_target_term && bank_target.index_of(class_id)) {
    const BankCeGrad tgt =
        bank_cross_entropy_with_grad(z, class_id, bank_target, logit_scale);
    out.loss += tgt.loss;
    out.grad_z += tgt.grad_z;
    out.target_term_included = true;
  }
  return out;
}

}  // namespace gzsl
