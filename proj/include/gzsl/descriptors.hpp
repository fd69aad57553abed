// SPDX-License-Identifier: Apache-2.0
//
// Per-class descriptor vectors derived from side-information images, plus the
// interchange formats other ZSL pipelines consume.
#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gzsl/dataset.hpp"
#include "gzsl/nn.hpp"

namespace gzsl {

struct ClassDescriptor {
  std::string class_id;
  Eigen::VectorXd phi;  // unit norm
};

// Sum of the encoder outputs over a class's samples, L2-normalized.
// Classes with no samples raise EmptyClass; a vanishing sum raises
// DegenerateVector.
std::vector<ClassDescriptor> class_descriptors(
    const EncoderContract& encoder,
    const std::map<std::string, std::vector<Eigen::VectorXd>>& samples_by_class);

// Convenience overload grouping a labelled dataset by class.
std::vector<ClassDescriptor> class_descriptors(const EncoderContract& encoder,
                                               const LabeledVectors& data);

// Text format: header line "class_id,dim", then one line per class with the
// id and dim decimal floats. Shortest round-trip formatting makes re-imports
// exact and files byte-stable.
void export_descriptors_text(const std::vector<ClassDescriptor>& descriptors,
                             const std::filesystem::path& path);
std::vector<ClassDescriptor> import_descriptors_text(
    const std::filesystem::path& path);

// Binary format: magic "GZSLDESC", u32 version, u32 count, u32 dim, then per
// record a u32 id length, the id bytes and dim little-endian f32 values.
void export_descriptors_binary(const std::vector<ClassDescriptor>& descriptors,
                               const std::filesystem::path& path);
std::vector<ClassDescriptor> import_descriptors_binary(
    const std::filesystem::path& path);

}  // namespace gzsl
