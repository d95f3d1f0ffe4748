//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mpulab/error.hpp"

namespace mpulab {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidRegion: return "InvalidRegion";
    case Errc::InexpressiblePermissions: return "InexpressiblePermissions";
    case Errc::MalformedEncoding: return "MalformedEncoding";
    case Errc::RegionBudgetExhausted: return "RegionBudgetExhausted";
    case Errc::UnsatisfiableFixedPlacement: return "UnsatisfiableFixedPlacement";
    case Errc::OverlappingPolicyRules: return "OverlappingPolicyRules";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace mpulab
