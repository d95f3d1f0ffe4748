//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>

#include "mpulab/error.hpp"
#include "mpulab/mpu.hpp"

namespace mpulab::mpu {

std::string_view to_string(Verdict verdict) noexcept {
  return verdict == Verdict::Allow ? "Allow" : "Fault";
}

std::string_view to_string(FaultReason reason) noexcept {
  switch (reason) {
    case FaultReason::NoMatchingRegion: return "NoMatchingRegion";
    case FaultReason::PermissionDenied: return "PermissionDenied";
    case FaultReason::MpuDisabledPolicy: return "MpuDisabledPolicy";
  }
  return "NoMatchingRegion";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "Allow") return Verdict::Allow;
  if (text == "Fault") return Verdict::Fault;
  return std::nullopt;
}

std::optional<FaultReason> parse_fault_reason(std::string_view text) {
  for (auto r : {FaultReason::NoMatchingRegion, FaultReason::PermissionDenied,
                 FaultReason::MpuDisabledPolicy}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

Resolver::Resolver(MpuConfig config) : config_(std::move(config)) {
  if (auto violations = validate_config(config_); !violations.empty()) {
    const auto& v = violations.front();
    std::string where = v.region ? "region " + std::to_string(*v.region) + ": " : "";
    throw Error(Errc::InvalidConfig, where + std::string(to_string(v.code)) + " (" + v.detail +
                                         ")");
  }

  if (const auto* v7 = std::get_if<V7Regions>(&config_.regions)) {
    for (const auto& r : *v7) {
      if (!r.enabled) continue;
      entries_.push_back({r.number, r.base, r.size(), r.has_subregions() ? r.subregion_size() : 0,
                          r.srd_mask, r.perms});
    }
  } else {
    for (const auto& r : std::get<V8Regions>(config_.regions)) {
      if (!r.enabled) continue;
      auto range = r.range();
      entries_.push_back({r.number, range.base, range.size, 0, 0, r.perms});
    }
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.number > b.number; });
}

const Resolver::Entry* Resolver::match(std::uint64_t address) const {
  for (const auto& e : entries_) {
    if (address < e.base || address - e.base >= e.size) continue;
    if (e.subregion_size != 0) {
      auto index = (address - e.base) / e.subregion_size;
      // A disabled sub-region falls through to lower-numbered regions.
      if (e.srd_mask & (1U << index)) continue;
    }
    return &e;
  }
  return nullptr;
}

AccessDecision Resolver::resolve(const AccessQuery& query) const {
  if (!config_.mpu_enabled) return {};
  if (const Entry* e = match(query.address)) {
    if (e->perms.of(query.mode).allows(query.kind)) {
      return {Verdict::Allow, std::nullopt, e->number};
    }
    return {Verdict::Fault, FaultReason::PermissionDenied, e->number};
  }
  if (query.mode == Mode::Privileged && config_.background_enabled) return {};
  return {Verdict::Fault, FaultReason::NoMatchingRegion, std::nullopt};
}

PermissionSet Resolver::effective(std::uint32_t address) const {
  PermissionSet out;
  for (Mode mode : kModes) {
    Rights rights;
    for (AccessKind kind : kAccessKinds) {
      if (resolve({address, mode, kind}).allowed()) rights |= Rights::of(kind);
    }
    (mode == Mode::Privileged ? out.privileged : out.unprivileged) = rights;
  }
  return out;
}

std::optional<unsigned> Resolver::matching_region(std::uint32_t address) const {
  if (!config_.mpu_enabled) return std::nullopt;
  if (const Entry* e = match(address)) return e->number;
  return std::nullopt;
}

AccessDecision resolve_access(const MpuConfig& config, const AccessQuery& query) {
  return Resolver(config).resolve(query);
}

}  // namespace mpulab::mpu
