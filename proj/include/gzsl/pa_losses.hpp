// SPDX-License-Identifier: Apache-2.0
//
// Prototype-alignment losses. Bank entries act as constants: gradients flow
// into the sample embedding (and projection head parameters), never into the
// bank.
#pragma once

#include <Eigen/Core>
#include <span>
#include <string>

#include "gzsl/bank.hpp"
#include "gzsl/nn.hpp"

namespace gzsl {

// Softmax cross-entropy of a sample against its own-domain prototypes,
//   -log[ exp(h(z).h(phi_y)/tau) / sum_{k in C} exp(h(z).h(phi_k)/tau) ],
// with C the initialized classes of the bank. The label's prototype must be
// initialized (UninitializedPrototype). A single-class softmax gives 0.
double indomain_contrastive_loss(const Eigen::VectorXd& z,
                                 const std::string& class_id,
                                 const PrototypeBank& bank,
                                 const ProjectionHead& head, double tau);

struct InDomainGrad {
  double loss = 0.0;
  Eigen::VectorXd grad_z;
};

// As above plus dL/dz; head parameter gradients (including the paths through
// h(phi_k)) are accumulated into head_grad when non-empty.
InDomainGrad indomain_contrastive_loss_with_grad(const Eigen::VectorXd& z,
                                                 const std::string& class_id,
                                                 const PrototypeBank& bank,
                                                 const ProjectionHead& head,
                                                 double tau,
                                                 std::span<double> head_grad);

struct BankCeGrad {
  double loss = 0.0;
  Eigen::VectorXd grad_z;
};

// Cross-entropy of logit_scale * z . phi_k over the initialized entries of
// one bank. The label's prototype must be initialized.
BankCeGrad bank_cross_entropy_with_grad(const Eigen::VectorXd& z,
                                        const std::string& class_id,
                                        const PrototypeBank& bank,
                                        double logit_scale);

// Cross-entropy against source prototypes over all classes plus, when the
// label is present in the target bank, cross-entropy against the target
// prototypes of the seen classes. Softmaxes run over initialized entries; the
// label must be initialized in the source bank.
double dual_domain_cls_loss(const Eigen::VectorXd& z,
                            const std::string& class_id,
                            const PrototypeBank& bank_source,
                            const PrototypeBank& bank_target,
                            double logit_scale = 1.0);

struct DualDomainGrad {
  double loss = 0.0;
  Eigen::VectorXd grad_z;
  bool target_term_included = false;
};

DualDomainGrad dual_domain_cls_loss_with_grad(const Eigen::VectorXd& z,
                                              const std::string& class_id,
                                              const PrototypeBank& bank_source,
                                              const PrototypeBank& bank_target,
                                              double logit_scale = 1.0,
                                              bool include_target_term = true);

}  // namespace gzsl
