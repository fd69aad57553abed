// SPDX-License-Identifier: Apache-2.0
//
// Exception types used across the toolkit. Every error carries a stable
// snake_case code so tools can emit machine-readable failure records.
#pragma once

#include <stdexcept>
#include <string>

namespace gzsl {

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define GZSL_ERROR_TYPE(Name, code)                                 \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(code, what) {}   \
  }

// Taxonomy / split
GZSL_ERROR_TYPE(MissingColumn, "missing_column");
GZSL_ERROR_TYPE(InvalidRecord, "invalid_record");
GZSL_ERROR_TYPE(InconsistentLineage, "inconsistent_lineage");
GZSL_ERROR_TYPE(DuplicateSpeciesConflict, "duplicate_species_conflict");
GZSL_ERROR_TYPE(UnknownSpecies, "unknown_species");
GZSL_ERROR_TYPE(InvalidSeenCount, "invalid_seen_count");

// Numerics
GZSL_ERROR_TYPE(DegenerateVector, "degenerate_vector");
GZSL_ERROR_TYPE(DimensionMismatch, "dimension_mismatch");
GZSL_ERROR_TYPE(NonFiniteLoss, "non_finite_loss");
GZSL_ERROR_TYPE(NoPositivePairs, "no_positive_pairs");
GZSL_ERROR_TYPE(NonUnitInput, "non_unit_input");

// Descriptors / banks
GZSL_ERROR_TYPE(EmptyClass, "empty_class");
GZSL_ERROR_TYPE(EmptyClassList, "empty_class_list");
GZSL_ERROR_TYPE(UninitializedPrototype, "uninitialized_prototype");

// Config / evaluation
GZSL_ERROR_TYPE(InvalidConfig, "invalid_config");
GZSL_ERROR_TYPE(EmptyClassInSubset, "empty_class_in_subset");
GZSL_ERROR_TYPE(NegativeInput, "negative_input");
GZSL_ERROR_TYPE(InvalidSpec, "invalid_spec");

// Data / IO
GZSL_ERROR_TYPE(MissingFile, "missing_file");
GZSL_ERROR_TYPE(UnknownClass, "unknown_class");
GZSL_ERROR_TYPE(UnseenPhotoLeak, "unseen_photo_leak");
GZSL_ERROR_TYPE(IOFailure, "io_failure");

#undef GZSL_ERROR_TYPE

}  // namespace gzsl
