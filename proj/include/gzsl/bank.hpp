// SPDX-License-Identifier: Apache-2.0
//
// Per-domain class prototype memory bank with momentum updates.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace gzsl {

enum class Domain { source, target };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

// Holds one prototype per class. Slots start uninitialized; the first
// observed embedding of a class becomes its prototype (normalized), later
// samples blend in with momentum. Every initialized entry is unit norm.
class PrototypeBank {
 public:
  PrototypeBank() = default;
  PrototypeBank(Domain domain, std::vector<std::string> classes, int dim);

  Domain domain() const { return domain_; }
  int dim() const { return dim_; }
  std::size_t size() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }

  std::optional<int> index_of(const std::string& class_id) const;

  bool initialized(int index) const;
  bool all_initialized() const;
  int initialized_count() const;
  std::vector<int> initialized_indices() const;

  // Throws UninitializedPrototype for untouched slots.
  Eigen::VectorXd prototype(int index) const;
  // Row per class; rows of untouched slots are zero.
  const Eigen::MatrixXd& matrix() const { return prototypes_; }

  // phi <- eta((1-m) z + m phi); first touch sets phi = eta(z) directly.
  // Throws DegenerateVector when the blend cancels to (near) zero.
  void update(int index, const Eigen::VectorXd& z, double momentum);
  void update(const std::string& class_id, const Eigen::VectorXd& z,
              double momentum);

  // Class-id-keyed export so checkpoints survive class reordering.
  nlohmann::json to_json() const;
  static PrototypeBank from_json(const nlohmann::json& j);

 private:
  Domain domain_ = Domain::source;
  int dim_ = 0;
  std::vector<std::string> classes_;
  std::unordered_map<std::string, int> index_;
  Eigen::MatrixXd prototypes_;  // size() x dim
  std::vector<bool> initialized_;
};

// Fresh bank with every slot uninitialized.
PrototypeBank init_bank(Domain domain, std::vector<std::string> classes,
                        int dim);

// Single momentum update; returns the new prototype.
Eigen::VectorXd update_prototype(PrototypeBank& bank,
                                 const std::string& class_id,
                                 const Eigen::VectorXd& z, double momentum);

}  // namespace gzsl
