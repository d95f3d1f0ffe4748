//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mpulab/permissions.hpp"

#include <cstdio>

namespace mpulab {

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::Privileged ? "Privileged" : "Unprivileged";
}

std::string_view to_string(AccessKind kind) noexcept {
  switch (kind) {
    case AccessKind::Read: return "Read";
    case AccessKind::Write: return "Write";
    case AccessKind::Execute: return "Execute";
  }
  return "Read";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "Privileged" || text == "privileged" || text == "priv" || text == "p") {
    return Mode::Privileged;
  }
  if (text == "Unprivileged" || text == "unprivileged" || text == "unpriv" || text == "user" ||
      text == "u") {
    return Mode::Unprivileged;
  }
  return std::nullopt;
}

std::optional<AccessKind> parse_access_kind(std::string_view text) {
  if (text == "Read" || text == "read" || text == "r") return AccessKind::Read;
  if (text == "Write" || text == "write" || text == "w") return AccessKind::Write;
  if (text == "Execute" || text == "execute" || text == "exec" || text == "x") {
    return AccessKind::Execute;
  }
  return std::nullopt;
}

std::string Rights::str() const {
  std::string out = "---";
  if (read()) out[0] = 'r';
  if (write()) out[1] = 'w';
  if (execute()) out[2] = 'x';
  return out;
}

std::optional<Rights> Rights::parse(std::string_view text) {
  std::uint8_t bits = 0;
  for (char c : text) {
    std::uint8_t bit = 0;
    switch (c) {
      case 'r': bit = kRead; break;
      case 'w': bit = kWrite; break;
      case 'x': bit = kExecute; break;
      case '-': continue;
      default: return std::nullopt;
    }
    if (bits & bit) return std::nullopt;
    bits |= bit;
  }
  return Rights{bits};
}

std::string hex32(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%08llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace mpulab
