//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <map>
#include <tuple>

#include "mpulab/mpu.hpp"

namespace mpulab::mpu {
namespace {

constexpr std::array kViolationNames = {
    std::pair{ViolationCode::InvalidMaxRegions, std::string_view{"InvalidMaxRegions"}},
    std::pair{ViolationCode::ArchMismatch, std::string_view{"ArchMismatch"}},
    std::pair{ViolationCode::TooManyRegions, std::string_view{"TooManyRegions"}},
    std::pair{ViolationCode::RegionNumberOutOfRange, std::string_view{"RegionNumberOutOfRange"}},
    std::pair{ViolationCode::DuplicateNumber, std::string_view{"DuplicateNumber"}},
    std::pair{ViolationCode::SizeOutOfRange, std::string_view{"SizeOutOfRange"}},
    std::pair{ViolationCode::MinSize, std::string_view{"MinSize"}},
    std::pair{ViolationCode::Misaligned, std::string_view{"Misaligned"}},
    std::pair{ViolationCode::SrdOnSmallRegion, std::string_view{"SrdOnSmallRegion"}},
    std::pair{ViolationCode::AllSubregionsDisabled, std::string_view{"AllSubregionsDisabled"}},
    std::pair{ViolationCode::V8Misaligned, std::string_view{"V8Misaligned"}},
    std::pair{ViolationCode::V8StartAfterLimit, std::string_view{"V8StartAfterLimit"}},
    std::pair{ViolationCode::V8Overlap, std::string_view{"V8Overlap"}},
};

Violation region_violation(unsigned number, ViolationCode code, std::string detail) {
  return Violation{number, code, std::move(detail)};
}

void validate_v7_region(const V7Region& r, std::vector<Violation>& out) {
  // SIZE is a 5-bit field, so 31 (4 GiB) is the largest encodable exponent.
  if (r.size_exponent > 31) {
    out.push_back(region_violation(r.number, ViolationCode::SizeOutOfRange,
                                   "size_exponent " + std::to_string(r.size_exponent) +
                                       " exceeds 31"));
    return;
  }
  if (r.size_exponent < 4) {
    out.push_back(region_violation(
        r.number, ViolationCode::MinSize,
        "size " + std::to_string(r.size()) + " bytes is below the 32-byte minimum"));
  }
  if (r.base % r.size() != 0) {
    out.push_back(region_violation(r.number, ViolationCode::Misaligned,
                                   "base " + hex32(r.base) + " is not a multiple of size " +
                                       hex32(r.size())));
  }
  if (r.srd_mask != 0 && !r.has_subregions()) {
    out.push_back(region_violation(r.number, ViolationCode::SrdOnSmallRegion,
                                   "sub-regions require a region of at least 256 bytes"));
  }
  if (r.enabled && r.srd_mask == 0xFF) {
    out.push_back(region_violation(r.number, ViolationCode::AllSubregionsDisabled,
                                   "enabled region has every sub-region disabled"));
  }
}

void validate_v8_regions(const V8Regions& regions, std::vector<Violation>& out) {
  for (const auto& r : regions) {
    if (r.start % kMinRegionSize != 0 || (std::uint64_t{r.limit} + 1) % kMinRegionSize != 0) {
      out.push_back(region_violation(r.number, ViolationCode::V8Misaligned,
                                     "start " + hex32(r.start) + " / limit " + hex32(r.limit) +
                                         " not on 32-byte boundaries"));
    }
    if (r.start > r.limit) {
      out.push_back(region_violation(r.number, ViolationCode::V8StartAfterLimit,
                                     "start " + hex32(r.start) + " above limit " +
                                         hex32(r.limit)));
    }
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = 0; j < regions.size(); ++j) {
      const auto& a = regions[i];
      const auto& b = regions[j];
      if (i == j || !a.enabled || !b.enabled || a.start > a.limit || b.start > b.limit) continue;
      // Report each overlapping pair once, on the higher-numbered region.
      if (std::tie(a.number, i) <= std::tie(b.number, j)) continue;
      if (a.start <= b.limit && b.start <= a.limit) {
        out.push_back(region_violation(a.number, ViolationCode::V8Overlap,
                                       "overlaps region " + std::to_string(b.number)));
      }
    }
  }
}

template <typename Region>
void validate_numbers(const std::vector<Region>& regions, unsigned max_regions,
                      std::vector<Violation>& out) {
  std::map<unsigned, int> seen;
  for (const auto& r : regions) {
    if (r.number >= max_regions) {
      out.push_back(region_violation(r.number, ViolationCode::RegionNumberOutOfRange,
                                     "region number must be below " +
                                         std::to_string(max_regions)));
    }
    if (seen[r.number]++ > 0) {
      out.push_back(region_violation(r.number, ViolationCode::DuplicateNumber,
                                     "region number used more than once"));
    }
  }
}

}  // namespace

std::string_view to_string(Arch arch) noexcept { return arch == Arch::V7 ? "v7" : "v8"; }

std::optional<Arch> parse_arch(std::string_view text) {
  if (text == "v7" || text == "V7" || text == "armv7-m") return Arch::V7;
  if (text == "v8" || text == "V8" || text == "armv8-m") return Arch::V8;
  return std::nullopt;
}

std::string_view to_string(ViolationCode code) noexcept {
  for (const auto& [c, name] : kViolationNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

std::optional<ViolationCode> parse_violation_code(std::string_view text) {
  for (const auto& [c, name] : kViolationNames) {
    if (name == text) return c;
  }
  return std::nullopt;
}

std::size_t region_count(const RegionList& regions) {
  return std::visit([](const auto& list) { return list.size(); }, regions);
}

bool V7Region::covers(std::uint64_t address) const {
  if (address < base || address - base >= size()) return false;
  if (!has_subregions()) return true;
  return subregion_enabled(static_cast<unsigned>((address - base) / subregion_size()));
}

std::vector<Violation> validate_region(const V7Region& region) {
  std::vector<Violation> out;
  validate_v7_region(region, out);
  return out;
}

std::vector<Violation> validate_config(const MpuConfig& config) {
  std::vector<Violation> out;

  const bool max_ok = config.arch == Arch::V7
                          ? (config.max_regions == 8 || config.max_regions == 16)
                          : config.max_regions == 16;
  if (!max_ok) {
    out.push_back({std::nullopt, ViolationCode::InvalidMaxRegions,
                   "max_regions " + std::to_string(config.max_regions) + " invalid for " +
                       std::string(to_string(config.arch))});
  }
  const bool holds_v7 = std::holds_alternative<V7Regions>(config.regions);
  if (holds_v7 != (config.arch == Arch::V7)) {
    out.push_back({std::nullopt, ViolationCode::ArchMismatch,
                   "region list does not match arch " + std::string(to_string(config.arch))});
  }
  if (region_count(config.regions) > config.max_regions) {
    out.push_back({std::nullopt, ViolationCode::TooManyRegions,
                   std::to_string(region_count(config.regions)) + " regions exceed max_regions " +
                       std::to_string(config.max_regions)});
  }

  if (const auto* v7 = std::get_if<V7Regions>(&config.regions)) {
    validate_numbers(*v7, config.max_regions, out);
    for (const auto& r : *v7) validate_v7_region(r, out);
  } else {
    const auto& v8 = std::get<V8Regions>(config.regions);
    validate_numbers(v8, config.max_regions, out);
    validate_v8_regions(v8, out);
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    // nullopt compares below every region number.
    return std::tie(a.region, a.code) < std::tie(b.region, b.code);
  });
  return out;
}

}  // namespace mpulab::mpu
