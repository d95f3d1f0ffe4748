//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <tuple>

#include "mpulab/audit.hpp"
#include "mpulab/error.hpp"

namespace mpulab::audit {
namespace {

using Key = std::pair<Mode, FindingKind>;

void check_policy(const Policy& policy) {
  for (Mode mode : kModes) {
    std::vector<const PolicyRule*> rules;
    for (const auto& r : policy) {
      if (!r.range.valid()) {
        throw Error(Errc::InvalidArgument, "policy rule at " + hex32(r.range.base) +
                                               " has an invalid range");
      }
      if (r.mode == mode) rules.push_back(&r);
    }
    std::sort(rules.begin(), rules.end(), [](const PolicyRule* a, const PolicyRule* b) {
      return a->range.base < b->range.base;
    });
    for (std::size_t i = 1; i < rules.size(); ++i) {
      if (rules[i - 1]->range.overlaps(rules[i]->range)) {
        throw Error(Errc::OverlappingPolicyRules,
                    std::string(to_string(mode)) + " rules at " + hex32(rules[i - 1]->range.base) +
                        " and " + hex32(rules[i]->range.base) + " overlap");
      }
    }
  }
}

const PolicyRule* covering_rule(const Policy& policy, Mode mode, std::uint64_t address) {
  for (const auto& r : policy) {
    if (r.mode == mode && r.range.contains(address)) return &r;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(FindingKind kind) noexcept {
  switch (kind) {
    case FindingKind::OverPermissive: return "OverPermissive";
    case FindingKind::UnderPermissive: return "UnderPermissive";
    case FindingKind::EscalationGateReachable: return "EscalationGateReachable";
    case FindingKind::UnmappedPrivilegedDefault: return "UnmappedPrivilegedDefault";
  }
  return "OverPermissive";
}

std::optional<FindingKind> parse_finding_kind(std::string_view text) {
  for (auto k : {FindingKind::OverPermissive, FindingKind::UnderPermissive,
                 FindingKind::EscalationGateReachable, FindingKind::UnmappedPrivilegedDefault}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

AddressRange Finding::span() const {
  if (const auto* gate = std::get_if<GateSymbol>(&subject)) return {gate->address, 1};
  return std::get<AddressRange>(subject);
}

void sort_findings(std::vector<Finding>& findings) {
  std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    return std::make_tuple(a.span().base, a.kind, a.mode) <
           std::make_tuple(b.span().base, b.kind, b.mode);
  });
}

std::vector<Finding> diff_policy(const mpu::MpuConfig& config, const Policy& policy,
                                 const AddressRange& universe, std::uint64_t granularity) {
  if (!universe.valid()) throw Error(Errc::InvalidArgument, "universe range is empty or wraps");
  if (granularity < mpu::kMinRegionSize || universe.size % granularity != 0) {
    throw Error(Errc::InvalidArgument, "granularity " + std::to_string(granularity) +
                                           " must be >= 32 and divide the universe size");
  }
  check_policy(policy);
  const mpu::Resolver resolver(config);

  // Both the effective map and the policy are constant between these points.
  auto edges = mpu::decision_boundaries(config);
  for (const auto& r : policy) {
    edges.push_back(r.range.base);
    edges.push_back(r.range.end());
  }
  std::vector<std::uint64_t> starts{universe.base};
  for (auto b : edges) {
    if (b <= universe.base || b >= universe.end()) continue;
    auto aligned =
        universe.base + (b - universe.base + granularity - 1) / granularity * granularity;
    if (aligned < universe.end()) starts.push_back(aligned);
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  std::vector<Finding> out;
  std::map<Key, Finding> open;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto seg_base = starts[i];
    const auto seg_end = i + 1 < starts.size() ? starts[i + 1] : universe.end();
    const auto address = static_cast<std::uint32_t>(seg_base);
    const auto granted_all = resolver.effective(address);
    const bool from_background = config.mpu_enabled && !resolver.matching_region(address);

    std::map<Key, Finding> here;
    for (Mode mode : kModes) {
      const Rights granted = granted_all.of(mode);
      const PolicyRule* rule = covering_rule(policy, mode, seg_base);
      const AddressRange seg{seg_base, seg_end - seg_base};
      if (!rule && from_background && mode == Mode::Privileged && !granted.empty()) {
        here[{mode, FindingKind::UnmappedPrivilegedDefault}] =
            Finding{FindingKind::UnmappedPrivilegedDefault, seg, mode, granted, Rights::none()};
        continue;
      }
      const Rights intended = rule ? rule->allowed : Rights::none();
      if (!granted.minus(intended).empty()) {
        here[{mode, FindingKind::OverPermissive}] =
            Finding{FindingKind::OverPermissive, seg, mode, granted, intended};
      }
      if (!intended.minus(granted).empty()) {
        here[{mode, FindingKind::UnderPermissive}] =
            Finding{FindingKind::UnderPermissive, seg, mode, granted, intended};
      }
    }

    for (auto it = open.begin(); it != open.end();) {
      auto match = here.find(it->first);
      if (match != here.end() && match->second.granted == it->second.granted &&
          match->second.intended == it->second.intended) {
        std::get<AddressRange>(it->second.subject).size = seg_end - it->second.span().base;
        here.erase(match);
        ++it;
      } else {
        out.push_back(it->second);
        it = open.erase(it);
      }
    }
    for (auto& [key, finding] : here) open.emplace(key, finding);
  }
  for (auto& [key, finding] : open) out.push_back(finding);
  sort_findings(out);
  return out;
}

std::vector<Finding> audit_gates(const mpu::MpuConfig& config, std::span<const GateSymbol> gates) {
  const mpu::Resolver resolver(config);
  std::vector<Finding> out;
  for (const auto& gate : gates) {
    if (!resolver.resolve({gate.address, Mode::Unprivileged, AccessKind::Execute}).allowed()) {
      continue;
    }
    out.push_back(Finding{FindingKind::EscalationGateReachable, gate, Mode::Unprivileged,
                          resolver.effective(gate.address).unprivileged, Rights::none()});
  }
  sort_findings(out);
  return out;
}

std::vector<Finding> run_audit(const mpu::MpuConfig& config, const Policy& policy,
                               std::span<const GateSymbol> gates,
                               std::span<const AddressRange> universe, std::uint64_t granularity) {
  std::vector<Finding> out = audit_gates(config, gates);
  for (const auto& band : universe) {
    auto part = diff_policy(config, policy, band, granularity);
    out.insert(out.end(), part.begin(), part.end());
  }
  sort_findings(out);
  return out;
}

std::string format_finding(const Finding& finding) {
  const auto span = finding.span();
  return std::string(to_string(finding.kind)) + " " + std::string(to_string(finding.mode)) + " " +
         hex32(span.base) + ".." + hex32(span.last()) + " granted=" + finding.granted.str() +
         " intended=" + finding.intended.str();
}

std::string format_findings(std::span<const Finding> findings) {
  std::vector<std::string> lines;
  for (const auto& f : findings) lines.push_back(format_finding(f));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) out += line + "\n";
  return out;
}

}  // namespace mpulab::audit
