//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string_view>

#include <json.hpp>

#include "mpulab/audit.hpp"
#include "mpulab/layout.hpp"
#include "mpulab/mpu.hpp"
#include "mpulab/overhead.hpp"
#include "mpulab/permissions.hpp"

namespace mpulab::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// An integer or a string in hex ("0x...") or decimal. Throws Error(ParseError).
std::uint64_t parse_number(const json& value, std::string_view field);
/// parse_number restricted to the 32-bit address space.
std::uint32_t parse_address(const json& value, std::string_view field);

json region_list_to_json(const mpu::RegionList& regions);
mpu::RegionList region_list_from_json(const json& value, mpu::Arch arch);

}  // namespace mpulab::cli

// Serializers live next to their types so nlohmann finds them by ADL.

namespace mpulab {
void to_json(nlohmann::json& j, const AddressRange& v);
void from_json(const nlohmann::json& j, AddressRange& v);
void to_json(nlohmann::json& j, const Rights& v);
void from_json(const nlohmann::json& j, Rights& v);
void to_json(nlohmann::json& j, const PermissionSet& v);
void from_json(const nlohmann::json& j, PermissionSet& v);
void to_json(nlohmann::json& j, const Mode& v);
void from_json(const nlohmann::json& j, Mode& v);
void to_json(nlohmann::json& j, const AccessKind& v);
void from_json(const nlohmann::json& j, AccessKind& v);
}  // namespace mpulab

namespace mpulab::mpu {
void to_json(nlohmann::json& j, const V7Region& v);
void from_json(const nlohmann::json& j, V7Region& v);
void to_json(nlohmann::json& j, const V8Region& v);
void from_json(const nlohmann::json& j, V8Region& v);
void to_json(nlohmann::json& j, const MpuConfig& v);
void from_json(const nlohmann::json& j, MpuConfig& v);
void to_json(nlohmann::json& j, const Violation& v);
void from_json(const nlohmann::json& j, Violation& v);
void to_json(nlohmann::json& j, const AccessQuery& v);
void from_json(const nlohmann::json& j, AccessQuery& v);
void to_json(nlohmann::json& j, const AccessDecision& v);
void from_json(const nlohmann::json& j, AccessDecision& v);
void to_json(nlohmann::json& j, const V7Encoding& v);
void from_json(const nlohmann::json& j, V7Encoding& v);
void to_json(nlohmann::json& j, const EffectiveRange& v);
void from_json(const nlohmann::json& j, EffectiveRange& v);
}  // namespace mpulab::mpu

namespace mpulab::layout {
void to_json(nlohmann::json& j, const AllocationRequest& v);
void from_json(const nlohmann::json& j, AllocationRequest& v);
void to_json(nlohmann::json& j, const PackingPlan& v);
void from_json(const nlohmann::json& j, PackingPlan& v);
void to_json(nlohmann::json& j, const PeripheralSpec& v);
void from_json(const nlohmann::json& j, PeripheralSpec& v);
void to_json(nlohmann::json& j, const CoverPlan& v);
void from_json(const nlohmann::json& j, CoverPlan& v);
void to_json(nlohmann::json& j, const SectionDescriptor& v);
void from_json(const nlohmann::json& j, SectionDescriptor& v);
void to_json(nlohmann::json& j, const Cluster& v);
void from_json(const nlohmann::json& j, Cluster& v);
}  // namespace mpulab::layout

namespace mpulab::audit {
void to_json(nlohmann::json& j, const PolicyRule& v);
void from_json(const nlohmann::json& j, PolicyRule& v);
void to_json(nlohmann::json& j, const GateSymbol& v);
void from_json(const nlohmann::json& j, GateSymbol& v);
void to_json(nlohmann::json& j, const Finding& v);
void from_json(const nlohmann::json& j, Finding& v);
}  // namespace mpulab::audit

namespace mpulab::overhead {
void to_json(nlohmann::json& j, const Event& v);
void from_json(const nlohmann::json& j, Event& v);
void to_json(nlohmann::json& j, const CostModel& v);
void from_json(const nlohmann::json& j, CostModel& v);
void to_json(nlohmann::json& j, const Breakdown& v);
void from_json(const nlohmann::json& j, Breakdown& v);
void to_json(nlohmann::json& j, const OverheadReport& v);
void from_json(const nlohmann::json& j, OverheadReport& v);
}  // namespace mpulab::overhead
