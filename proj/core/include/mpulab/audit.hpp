//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mpulab/mpu.hpp"
#include "mpulab/permissions.hpp"

namespace mpulab::audit {

/// Intended rights for one privilege mode over a range.
struct PolicyRule {
  AddressRange range;
  Mode mode = Mode::Unprivileged;
  Rights allowed;

  friend bool operator==(const PolicyRule&, const PolicyRule&) = default;
};
using Policy = std::vector<PolicyRule>;

/// Entry point of a routine that raises the execution privilege.
struct GateSymbol {
  std::string name;
  std::uint32_t address = 0;

  friend bool operator==(const GateSymbol&, const GateSymbol&) = default;
};

enum class FindingKind : std::uint8_t {
  OverPermissive,
  UnderPermissive,
  EscalationGateReachable,
  UnmappedPrivilegedDefault,
};

std::string_view to_string(FindingKind kind) noexcept;
std::optional<FindingKind> parse_finding_kind(std::string_view text);

struct Finding {
  FindingKind kind = FindingKind::OverPermissive;
  std::variant<AddressRange, GateSymbol> subject;
  Mode mode = Mode::Unprivileged;
  Rights granted;
  Rights intended;

  /// The bytes the finding is about; a gate covers its single entry byte.
  [[nodiscard]] AddressRange span() const;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Orders by (address, kind, mode).
void sort_findings(std::vector<Finding>& findings);

/// Compares effective rights against `policy` granule by granule over
/// `universe`. Unruled space allows nothing; privileged grants there that come
/// from the background map are reported once per run as
/// UnmappedPrivilegedDefault. Adjacent identical findings are merged.
/// Throws Error(OverlappingPolicyRules) if two rules of one mode overlap.
[[nodiscard]] std::vector<Finding> diff_policy(const mpu::MpuConfig& config, const Policy& policy,
                                               const AddressRange& universe,
                                               std::uint64_t granularity = mpu::kDefaultGranularity);

/// A gate is reachable when unprivileged code may execute at its address.
[[nodiscard]] std::vector<Finding> audit_gates(const mpu::MpuConfig& config,
                                               std::span<const GateSymbol> gates);

/// diff_policy over each universe band plus audit_gates, sorted.
[[nodiscard]] std::vector<Finding> run_audit(const mpu::MpuConfig& config, const Policy& policy,
                                             std::span<const GateSymbol> gates,
                                             std::span<const AddressRange> universe,
                                             std::uint64_t granularity = mpu::kDefaultGranularity);

/// `<kind> <mode> <base>..<last> granted=<rwx> intended=<rwx>`, hex addresses,
/// inclusive last byte.
[[nodiscard]] std::string format_finding(const Finding& finding);
/// One line per finding, lexicographically sorted, each newline-terminated.
[[nodiscard]] std::string format_findings(std::span<const Finding> findings);

// ---------------------------------------------------------------------------
// MPU-enabled FreeRTOS reference layout (ARMv7-M, eight regions)

struct FixtureOptions {
  std::uint32_t stack_base = 0x20001000;
  std::uint64_t stack_depth = 0x1000;
  /// Task-defined regions 5..7; numbers are assigned in order.
  std::vector<mpu::V7Region> user_regions;
};

struct AuditSubject {
  mpu::MpuConfig config;
  Policy policy;
  std::vector<GateSymbol> gates;
  std::vector<AddressRange> universe;
};

/// Sampled bands: flash, the start of SRAM, the peripheral space and the
/// system control block in the private peripheral bus.
[[nodiscard]] std::vector<AddressRange> default_audit_universe();

/// The FreeRTOS-MPU memory map, an intended policy for it, and the privilege
/// raising gate placed in user-executable flash. Throws Error(InvalidArgument)
/// for a non-power-of-two stack depth or more than three user regions.
[[nodiscard]] AuditSubject freertos_fixture(const FixtureOptions& options = {});

}  // namespace mpulab::audit
