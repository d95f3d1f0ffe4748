//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "json_io.hpp"

#include <charconv>
#include <limits>
#include <string>

#include "mpulab/error.hpp"

namespace mpulab::cli {
namespace {

[[noreturn]] void bad(std::string_view field, std::string_view why) {
  throw Error(Errc::ParseError, "field '" + std::string(field) + "': " + std::string(why));
}

}  // namespace

std::uint64_t parse_number(const json& value, std::string_view field) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    if (value.get<std::int64_t>() < 0) bad(field, "must not be negative");
    return value.get<std::uint64_t>();
  }
  if (!value.is_string()) bad(field, "expected an integer or a numeric string");
  const auto& text = value.get_ref<const std::string&>();
  std::string_view digits = text;
  int base = 10;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    digits.remove_prefix(2);
    base = 16;
  }
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out, base);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    bad(field, "'" + text + "' is not a number");
  }
  return out;
}

std::uint32_t parse_address(const json& value, std::string_view field) {
  const auto n = parse_number(value, field);
  if (n > std::numeric_limits<std::uint32_t>::max()) bad(field, "address exceeds 32 bits");
  return static_cast<std::uint32_t>(n);
}

json region_list_to_json(const mpu::RegionList& regions) {
  return std::visit([](const auto& list) { return json(list); }, regions);
}

mpu::RegionList region_list_from_json(const json& value, mpu::Arch arch) {
  if (!value.is_array()) bad("regions", "expected an array");
  if (arch == mpu::Arch::V7) return value.get<mpu::V7Regions>();
  return value.get<mpu::V8Regions>();
}

}  // namespace mpulab::cli

namespace {

using mpulab::Errc;
using mpulab::Error;
using nlohmann::json;

const json& need(const json& j, const char* key) {
  if (!j.is_object()) throw Error(Errc::ParseError, std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

std::string need_string(const json& j, const char* key) {
  const auto& v = need(j, key);
  if (!v.is_string()) throw Error(Errc::ParseError, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

template <typename E, typename Parse>
E need_enum(const json& j, const char* key, Parse parse) {
  const auto text = need_string(j, key);
  auto e = parse(text);
  if (!e) throw Error(Errc::ParseError, std::string("field '") + key + "': unknown value '" + text + "'");
  return *e;
}

unsigned need_unsigned(const json& j, const char* key) {
  const auto n = mpulab::cli::parse_number(need(j, key), key);
  if (n > std::numeric_limits<unsigned>::max()) {
    throw Error(Errc::ParseError, std::string("field '") + key + "' is out of range");
  }
  return static_cast<unsigned>(n);
}

std::uint8_t need_byte(const json& j, const char* key) {
  const auto n = mpulab::cli::parse_number(need(j, key), key);
  if (n > 0xFF) throw Error(Errc::ParseError, std::string("field '") + key + "' exceeds 8 bits");
  return static_cast<std::uint8_t>(n);
}

std::uint8_t byte_or(const json& j, const char* key, std::uint8_t fallback) {
  return j.contains(key) ? need_byte(j, key) : fallback;
}

bool bool_or(const json& j, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw Error(Errc::ParseError, std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

}  // namespace

namespace mpulab {

void to_json(json& j, const AddressRange& v) { j = {{"base", hex32(v.base)}, {"size", v.size}}; }
void from_json(const json& j, AddressRange& v) {
  v.base = cli::parse_number(need(j, "base"), "base");
  v.size = cli::parse_number(need(j, "size"), "size");
  if (!v.valid()) throw Error(Errc::ParseError, "range at " + hex32(v.base) + " is empty or wraps");
}

void to_json(json& j, const Rights& v) { j = v.str(); }
void from_json(const json& j, Rights& v) {
  if (!j.is_string()) throw Error(Errc::ParseError, "rights must be a string such as \"rw-\"");
  auto r = Rights::parse(j.get<std::string>());
  if (!r) throw Error(Errc::ParseError, "bad rights '" + j.get<std::string>() + "'");
  v = *r;
}

void to_json(json& j, const PermissionSet& v) {
  j = {{"privileged", v.privileged}, {"unprivileged", v.unprivileged}};
}
void from_json(const json& j, PermissionSet& v) {
  v.privileged = need(j, "privileged").get<Rights>();
  v.unprivileged = need(j, "unprivileged").get<Rights>();
}

void to_json(json& j, const Mode& v) { j = std::string(to_string(v)); }
void from_json(const json& j, Mode& v) {
  auto m = j.is_string() ? parse_mode(j.get<std::string>()) : std::nullopt;
  if (!m) throw Error(Errc::ParseError, "bad mode " + j.dump());
  v = *m;
}

void to_json(json& j, const AccessKind& v) { j = std::string(to_string(v)); }
void from_json(const json& j, AccessKind& v) {
  auto k = j.is_string() ? parse_access_kind(j.get<std::string>()) : std::nullopt;
  if (!k) throw Error(Errc::ParseError, "bad access kind " + j.dump());
  v = *k;
}

}  // namespace mpulab

namespace mpulab::mpu {

void to_json(json& j, const V7Region& v) {
  j = {{"number", v.number},           {"base", hex32(v.base)},
       {"size_exponent", v.size_exponent}, {"srd_mask", v.srd_mask},
       {"perms", v.perms},             {"attrs", v.attrs.raw},
       {"enabled", v.enabled}};
}
void from_json(const json& j, V7Region& v) {
  v.number = need_unsigned(j, "number");
  v.base = cli::parse_address(need(j, "base"), "base");
  v.size_exponent = need_byte(j, "size_exponent");
  v.srd_mask = byte_or(j, "srd_mask", 0);
  v.perms = need(j, "perms").get<PermissionSet>();
  v.attrs.raw = byte_or(j, "attrs", 0);
  v.enabled = bool_or(j, "enabled", true);
}

void to_json(json& j, const V8Region& v) {
  j = {{"number", v.number}, {"start", hex32(v.start)}, {"limit", hex32(v.limit)},
       {"perms", v.perms},   {"attrs", v.attrs.raw},    {"enabled", v.enabled}};
}
void from_json(const json& j, V8Region& v) {
  v.number = need_unsigned(j, "number");
  v.start = cli::parse_address(need(j, "start"), "start");
  v.limit = cli::parse_address(need(j, "limit"), "limit");
  v.perms = need(j, "perms").get<PermissionSet>();
  v.attrs.raw = byte_or(j, "attrs", 0);
  v.enabled = bool_or(j, "enabled", true);
}

void to_json(json& j, const MpuConfig& v) {
  j = {{"arch", std::string(to_string(v.arch))},
       {"max_regions", v.max_regions},
       {"regions", cli::region_list_to_json(v.regions)},
       {"mpu_enabled", v.mpu_enabled},
       {"background_enabled", v.background_enabled}};
}
void from_json(const json& j, MpuConfig& v) {
  v.arch = need_enum<Arch>(j, "arch", parse_arch);
  v.max_regions = j.contains("max_regions") ? need_unsigned(j, "max_regions")
                                            : (v.arch == Arch::V7 ? 8U : 16U);
  v.regions = j.contains("regions") ? cli::region_list_from_json(j.at("regions"), v.arch)
                                    : (v.arch == Arch::V7 ? RegionList{V7Regions{}}
                                                          : RegionList{V8Regions{}});
  v.mpu_enabled = bool_or(j, "mpu_enabled", true);
  v.background_enabled = bool_or(j, "background_enabled", true);
}

void to_json(json& j, const Violation& v) {
  j = {{"region", v.region ? json(*v.region) : json(nullptr)},
       {"code", std::string(to_string(v.code))},
       {"detail", v.detail}};
}
void from_json(const json& j, Violation& v) {
  const auto& r = need(j, "region");
  v.region = r.is_null() ? std::nullopt : std::optional<unsigned>(need_unsigned(j, "region"));
  v.code = need_enum<ViolationCode>(j, "code", parse_violation_code);
  v.detail = need_string(j, "detail");
}

void to_json(json& j, const AccessQuery& v) {
  j = {{"address", hex32(v.address)}, {"mode", v.mode}, {"kind", v.kind}};
}
void from_json(const json& j, AccessQuery& v) {
  v.address = cli::parse_address(need(j, "address"), "address");
  v.mode = need(j, "mode").get<Mode>();
  v.kind = need(j, "kind").get<AccessKind>();
}

void to_json(json& j, const AccessDecision& v) {
  j = {{"verdict", std::string(to_string(v.verdict))},
       {"fault_reason", v.fault_reason ? json(std::string(to_string(*v.fault_reason))) : json(nullptr)},
       {"matched_region", v.matched_region ? json(*v.matched_region) : json(nullptr)}};
}
void from_json(const json& j, AccessDecision& v) {
  v.verdict = need_enum<Verdict>(j, "verdict", parse_verdict);
  v.fault_reason = need(j, "fault_reason").is_null()
                       ? std::nullopt
                       : std::optional(need_enum<FaultReason>(j, "fault_reason", parse_fault_reason));
  v.matched_region = need(j, "matched_region").is_null()
                         ? std::nullopt
                         : std::optional<unsigned>(need_unsigned(j, "matched_region"));
}

void to_json(json& j, const V7Encoding& v) { j = {{"bar", hex32(v.bar)}, {"basr", hex32(v.basr)}}; }
void from_json(const json& j, V7Encoding& v) {
  v.bar = cli::parse_address(need(j, "bar"), "bar");
  v.basr = cli::parse_address(need(j, "basr"), "basr");
}

void to_json(json& j, const EffectiveRange& v) { j = {{"range", v.range}, {"perms", v.perms}}; }
void from_json(const json& j, EffectiveRange& v) {
  v.range = need(j, "range").get<AddressRange>();
  v.perms = need(j, "perms").get<PermissionSet>();
}

}  // namespace mpulab::mpu

namespace mpulab::layout {

void to_json(json& j, const AllocationRequest& v) {
  json placement = {{"kind", "Floating"}};
  if (const auto* f = std::get_if<Fixed>(&v.placement)) {
    placement = {{"kind", "Fixed"}, {"base", hex32(f->base)}};
  }
  j = {{"id", v.id},
       {"size", v.size},
       {"perms", v.perms},
       {"placement", placement},
       {"context", v.context}};
}
void from_json(const json& j, AllocationRequest& v) {
  v.id = need_string(j, "id");
  v.size = cli::parse_number(need(j, "size"), "size");
  v.perms = need(j, "perms").get<PermissionSet>();
  v.placement = Floating{};
  if (j.contains("placement")) {
    const auto& p = j.at("placement");
    const auto kind = need_string(p, "kind");
    if (kind == "Fixed") {
      v.placement = Fixed{cli::parse_address(need(p, "base"), "placement.base")};
    } else if (kind != "Floating") {
      throw Error(Errc::ParseError, "placement kind must be Floating or Fixed");
    }
  }
  v.context = j.contains("context") ? need_string(j, "context") : v.id;
}

namespace {
mpu::Arch arch_of(const mpu::RegionList& list) {
  return std::holds_alternative<mpu::V7Regions>(list) ? mpu::Arch::V7 : mpu::Arch::V8;
}
}  // namespace

void to_json(json& j, const PackingPlan& v) {
  json placements = json::object();
  for (const auto& [id, range] : v.placements) placements[id] = range;
  json contexts = json::object();
  auto arch = mpu::Arch::V7;
  for (const auto& [ctx, list] : v.per_context_regions) {
    contexts[ctx] = cli::region_list_to_json(list);
    arch = arch_of(list);
  }
  j = {{"arch", std::string(mpu::to_string(arch))},
       {"placements", placements},
       {"per_context_regions", contexts},
       {"regions_used", v.regions_used},
       {"waste_bytes", v.waste_bytes},
       {"naive_waste_bytes", v.naive_waste_bytes}};
}
void from_json(const json& j, PackingPlan& v) {
  const auto arch = need_enum<mpu::Arch>(j, "arch", mpu::parse_arch);
  v = {};
  for (const auto& [id, range] : need(j, "placements").items()) {
    v.placements[id] = range.get<AddressRange>();
  }
  for (const auto& [ctx, list] : need(j, "per_context_regions").items()) {
    v.per_context_regions[ctx] = cli::region_list_from_json(list, arch);
  }
  v.regions_used = need_unsigned(j, "regions_used");
  v.waste_bytes = cli::parse_number(need(j, "waste_bytes"), "waste_bytes");
  v.naive_waste_bytes = cli::parse_number(need(j, "naive_waste_bytes"), "naive_waste_bytes");
}

void to_json(json& j, const PeripheralSpec& v) {
  j = {{"id", v.id}, {"range", v.range}, {"is_protected", v.is_protected}};
}
void from_json(const json& j, PeripheralSpec& v) {
  v.id = need_string(j, "id");
  v.range = need(j, "range").get<AddressRange>();
  v.is_protected = bool_or(j, "is_protected", false);
}

void to_json(json& j, const CoverPlan& v) {
  j = {{"arch", std::string(mpu::to_string(arch_of(v.privileged_view)))},
       {"privileged_view", cli::region_list_to_json(v.privileged_view)},
       {"unprivileged_view", cli::region_list_to_json(v.unprivileged_view)},
       {"uncovered", v.uncovered}};
}
void from_json(const json& j, CoverPlan& v) {
  const auto arch = need_enum<mpu::Arch>(j, "arch", mpu::parse_arch);
  v.privileged_view = cli::region_list_from_json(need(j, "privileged_view"), arch);
  v.unprivileged_view = cli::region_list_from_json(need(j, "unprivileged_view"), arch);
  v.uncovered = need(j, "uncovered").get<std::vector<std::string>>();
}

void to_json(json& j, const SectionDescriptor& v) {
  j = {{"id", v.id}, {"range", v.range}, {"perms", v.perms}};
}
void from_json(const json& j, SectionDescriptor& v) {
  v.id = need_string(j, "id");
  v.range = need(j, "range").get<AddressRange>();
  v.perms = need(j, "perms").get<PermissionSet>();
}

void to_json(json& j, const Cluster& v) {
  j = {{"members", v.members}, {"range", v.range}, {"perms", v.perms}};
}
void from_json(const json& j, Cluster& v) {
  v.members = need(j, "members").get<std::vector<std::string>>();
  v.range = need(j, "range").get<AddressRange>();
  v.perms = need(j, "perms").get<PermissionSet>();
}

}  // namespace mpulab::layout

namespace mpulab::audit {

void to_json(json& j, const PolicyRule& v) {
  j = {{"range", v.range}, {"mode", v.mode}, {"allowed", v.allowed}};
}
void from_json(const json& j, PolicyRule& v) {
  v.range = need(j, "range").get<AddressRange>();
  v.mode = need(j, "mode").get<Mode>();
  v.allowed = need(j, "allowed").get<Rights>();
}

void to_json(json& j, const GateSymbol& v) {
  j = {{"name", v.name}, {"address", hex32(v.address)}};
}
void from_json(const json& j, GateSymbol& v) {
  v.name = need_string(j, "name");
  v.address = cli::parse_address(need(j, "address"), "address");
}

void to_json(json& j, const Finding& v) {
  json subject;
  if (const auto* gate = std::get_if<GateSymbol>(&v.subject)) {
    subject = {{"gate", *gate}};
  } else {
    subject = {{"range", std::get<AddressRange>(v.subject)}};
  }
  j = {{"kind", std::string(to_string(v.kind))},
       {"subject", subject},
       {"mode", v.mode},
       {"granted", v.granted},
       {"intended", v.intended}};
}
void from_json(const json& j, Finding& v) {
  v.kind = need_enum<FindingKind>(j, "kind", parse_finding_kind);
  const auto& subject = need(j, "subject");
  if (subject.contains("gate")) {
    v.subject = subject.at("gate").get<GateSymbol>();
  } else {
    v.subject = need(subject, "range").get<AddressRange>();
  }
  v.mode = need(j, "mode").get<Mode>();
  v.granted = need(j, "granted").get<Rights>();
  v.intended = need(j, "intended").get<Rights>();
}

}  // namespace mpulab::audit

namespace mpulab::overhead {

void to_json(json& j, const Event& v) {
  j = {{"kind", std::string(to_string(v.kind))},
       {"task", v.task},
       {"timestamp", v.timestamp ? json(*v.timestamp) : json(nullptr)}};
}
void from_json(const json& j, Event& v) {
  v.kind = need_enum<EventKind>(j, "kind", parse_event_kind);
  v.task = j.contains("task") ? need_string(j, "task") : std::string{};
  auto it = j.find("timestamp");
  v.timestamp = it == j.end() || it->is_null() ? std::nullopt : std::optional(it->get<double>());
}

void to_json(json& j, const CostModel& v) {
  j = {{"seconds_per_priv_switch", v.seconds_per_priv_switch},
       {"reference_clock_hz", v.reference_clock_hz},
       {"target_clock_hz", v.target_clock_hz},
       {"seconds_per_region_write", v.seconds_per_region_write}};
}
void from_json(const json& j, CostModel& v) {
  // Every field is optional so a document can override just one.
  if (!j.is_object()) throw Error(Errc::ParseError, "cost_model must be an object");
  v.seconds_per_priv_switch = get_or(j, "seconds_per_priv_switch", v.seconds_per_priv_switch);
  v.reference_clock_hz = get_or(j, "reference_clock_hz", v.reference_clock_hz);
  v.target_clock_hz = get_or(j, "target_clock_hz", v.target_clock_hz);
  v.seconds_per_region_write = get_or(j, "seconds_per_region_write", v.seconds_per_region_write);
}

void to_json(json& j, const Breakdown& v) {
  j = {{"kind", std::string(to_string(v.kind))},
       {"count", v.count},
       {"priv_switches", v.priv_switches},
       {"region_writes", v.region_writes},
       {"seconds", v.seconds}};
}
void from_json(const json& j, Breakdown& v) {
  v.kind = need_enum<EventKind>(j, "kind", parse_event_kind);
  v.count = cli::parse_number(need(j, "count"), "count");
  v.priv_switches = cli::parse_number(need(j, "priv_switches"), "priv_switches");
  v.region_writes = cli::parse_number(need(j, "region_writes"), "region_writes");
  v.seconds = need(j, "seconds").get<double>();
}

void to_json(json& j, const OverheadReport& v) {
  j = {{"strategy", std::string(to_string(v.strategy))},
       {"priv_switches", v.priv_switches},
       {"region_writes", v.region_writes},
       {"total_seconds", v.total_seconds},
       {"per_event", v.per_event}};
}
void from_json(const json& j, OverheadReport& v) {
  v.strategy = need_enum<Strategy>(j, "strategy", parse_strategy);
  v.priv_switches = cli::parse_number(need(j, "priv_switches"), "priv_switches");
  v.region_writes = cli::parse_number(need(j, "region_writes"), "region_writes");
  v.total_seconds = need(j, "total_seconds").get<double>();
  v.per_event = need(j, "per_event").get<std::vector<Breakdown>>();
}

}  // namespace mpulab::overhead
