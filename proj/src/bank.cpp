// SPDX-License-Identifier: Apache-2.0
#include "gzsl/bank.hpp"

#include <algorithm>

#include "gzsl/errors.hpp"
#include "gzsl/linalg.hpp"

namespace gzsl {

std::string to_string(Domain d) {
  return d == Domain::source ? "source" : "target";
}

Domain domain_from_string(const std::string& s) {
  if (s == "source") return Domain::source;
  if (s == "target") return Domain::target;
  throw InvalidConfig("unknown domain: " + s);
}

PrototypeBank::PrototypeBank(Domain domain, std::vector<std::string> classes,
                             int dim)
    : domain_(domain), dim_(dim), classes_(std::move(classes)) {
  if (classes_.empty()) {
    throw EmptyClassList("prototype bank needs at least one class");
  }
  if (dim_ <= 0) {
    throw InvalidConfig("prototype dim must be positive");
  }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (!index_.emplace(classes_[i], static_cast<int>(i)).second) {
      throw InvalidConfig("duplicate class in bank: " + classes_[i]);
    }
  }
  prototypes_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(classes_.size()),
                                      dim_);
  initialized_.assign(classes_.size(), false);
}

std::optional<int> PrototypeBank::index_of(const std::string& class_id) const {
  const auto it = index_.find(class_id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

bool PrototypeBank::initialized(int index) const {
  return initialized_.at(static_cast<std::size_t>(index));
}

bool PrototypeBank::all_initialized() const {
  return std::all_of(initialized_.begin(), initialized_.end(),
                     [](bool b) { return b; });
}

int PrototypeBank::initialized_count() const {
  return static_cast<int>(
      std::count(initialized_.begin(), initialized_.end(), true));
}

std::vector<int> PrototypeBank::initialized_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < initialized_.size(); ++i) {
    if (initialized_[i]) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

Eigen::VectorXd PrototypeBank::prototype(int index) const {
  if (!initialized(index)) {
    throw UninitializedPrototype("class '" +
                                 classes_.at(static_cast<std::size_t>(index)) +
                                 "' has no prototype yet");
  }
  return prototypes_.row(index).transpose();
}

void PrototypeBank::update(int index, const Eigen::VectorXd& z,
                           double momentum) {
  if (z.size() != dim_) {
    throw DimensionMismatch("embedding dim does not match bank dim");
  }
  if (!z.allFinite()) {
    throw InvalidRecord("embedding contains non-finite values");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidConfig("momentum must lie in [0, 1)");
  }
  auto slot = static_cast<std::size_t>(index);
  if (!initialized_.at(slot)) {
    prototypes_.row(index) = l2_normalize(z).transpose();
    initialized_[slot] = true;
    return;
  }
  const Eigen::VectorXd blend =
      (1.0 - momentum) * z + momentum * prototypes_.row(index).transpose();
  prototypes_.row(index) = l2_normalize(blend).transpose();
}

void PrototypeBank::update(const std::string& class_id,
                           const Eigen::VectorXd& z, double momentum) {
  const auto idx = index_of(class_id);
  if (!idx) {
    throw UnknownClass("class '" + class_id + "' is not in the bank");
  }
  update(*idx, z, momentum);
}

nlohmann::json PrototypeBank::to_json() const {
  nlohmann::json entries = nlohmann::json::object();
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (initialized_[i]) {
      const Eigen::VectorXd row =
          prototypes_.row(static_cast<Eigen::Index>(i)).transpose();
      entries[classes_[i]] =
          std::vector<double>(row.data(), row.data() + row.size());
    } else {
      entries[classes_[i]] = nullptr;
    }
  }
  return {{"domain", to_string(domain_)},
          {"dim", dim_},
          {"classes", classes_},
          {"entries", entries}};
}

PrototypeBank PrototypeBank::from_json(const nlohmann::json& j) {
  PrototypeBank bank(domain_from_string(j.at("domain").get<std::string>()),
                     j.at("classes").get<std::vector<std::string>>(),
                     j.at("dim").get<int>());
  const auto& entries = j.at("entries");
  for (std::size_t i = 0; i < bank.classes_.size(); ++i) {
    const auto& e = entries.at(bank.classes_[i]);
    if (e.is_null()) {
      continue;
    }
    const auto values = e.get<std::vector<double>>();
    if (static_cast<int>(values.size()) != bank.dim_) {
      throw DimensionMismatch("bank entry '" + bank.classes_[i] +
                              "' has wrong dimension");
    }
    bank.prototypes_.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(values.data(), bank.dim_).transpose();
    bank.initialized_[i] = true;
  }
  return bank;
}

PrototypeBank init_bank(Domain domain, std::vector<std::string> classes,
                        int dim) {
  return PrototypeBank(domain, std::move(classes), dim);
}

Eigen::VectorXd update_prototype(PrototypeBank& bank,
                                 const std::string& class_id,
                                 const Eigen::VectorXd& z, double momentum) {
  bank.update(class_id, z, momentum);
  return bank.prototype(*bank.index_of(class_id));
}

}  // namespace gzsl
