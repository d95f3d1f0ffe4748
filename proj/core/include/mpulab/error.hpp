//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpulab {

enum class Errc {
  InvalidConfig,             // config fails validate_config where a valid one is required
  InvalidRegion,             // a single region breaks its own invariants
  InexpressiblePermissions,  // no AP/XN encoding exists for the permission set
  MalformedEncoding,         // register words outside the encoder's image
  RegionBudgetExhausted,
  UnsatisfiableFixedPlacement,
  OverlappingPolicyRules,
  UnknownTask,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(Errc code) noexcept;

/// Every contract failure in the library surfaces as this exception. The
/// code is machine-readable; what() carries a one-line human diagnostic.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mpulab
