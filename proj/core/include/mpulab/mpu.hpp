//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mpulab/permissions.hpp"

namespace mpulab::mpu {

enum class Arch : std::uint8_t { V7, V8 };

std::string_view to_string(Arch arch) noexcept;
std::optional<Arch> parse_arch(std::string_view text);

/// Smallest region the hardware can express, and the default enumeration step.
inline constexpr std::uint64_t kMinRegionSize = 32;
inline constexpr std::uint64_t kDefaultGranularity = kMinRegionSize;
/// v7 regions below this size have no sub-regions.
inline constexpr std::uint64_t kMinSubregionRegionSize = 256;
inline constexpr unsigned kSubregionCount = 8;

/// Ordering/caching attribute bits. Stored and round-tripped, never interpreted.
/// On v7 only the low six bits (BASR[21:16]) are encodable.
struct RegionAttributes {
  std::uint8_t raw = 0;

  friend constexpr bool operator==(RegionAttributes, RegionAttributes) = default;
};

/// ARMv7-M region: naturally aligned power-of-two block with eight sub-regions.
struct V7Region {
  unsigned number = 0;
  std::uint32_t base = 0;
  /// size = 2^(size_exponent + 1) bytes; the BASR SIZE field verbatim.
  std::uint8_t size_exponent = 4;
  /// Bit i set disables sub-region i; bit 0 is the lowest-addressed one.
  std::uint8_t srd_mask = 0;
  PermissionSet perms;
  RegionAttributes attrs;
  bool enabled = true;

  [[nodiscard]] std::uint64_t size() const { return std::uint64_t{1} << (size_exponent + 1U); }
  [[nodiscard]] bool has_subregions() const { return size() >= kMinSubregionRegionSize; }
  [[nodiscard]] std::uint64_t subregion_size() const { return size() / kSubregionCount; }
  [[nodiscard]] AddressRange range() const { return {base, size()}; }
  [[nodiscard]] bool subregion_enabled(unsigned index) const {
    return (srd_mask & (1U << index)) == 0;
  }
  /// True when `address` is inside the region and its sub-region is enabled.
  /// Ignores the `enabled` flag.
  [[nodiscard]] bool covers(std::uint64_t address) const;

  friend bool operator==(const V7Region&, const V7Region&) = default;
};

/// ARMv8-M region: 32-byte granular [start, limit] with an inclusive limit.
struct V8Region {
  unsigned number = 0;
  std::uint32_t start = 0;
  std::uint32_t limit = 31;
  PermissionSet perms;
  RegionAttributes attrs;
  bool enabled = true;

  [[nodiscard]] AddressRange range() const {
    return {start, std::uint64_t{limit} - start + 1};
  }

  friend bool operator==(const V8Region&, const V8Region&) = default;
};

using V7Regions = std::vector<V7Region>;
using V8Regions = std::vector<V8Region>;
using RegionList = std::variant<V7Regions, V8Regions>;

struct MpuConfig {
  Arch arch = Arch::V7;
  unsigned max_regions = 8;
  RegionList regions;
  bool mpu_enabled = true;
  /// PRIVDEFENA: privileged accesses that hit no region use the default map.
  bool background_enabled = true;

  friend bool operator==(const MpuConfig&, const MpuConfig&) = default;
};

[[nodiscard]] std::size_t region_count(const RegionList& regions);

// ---------------------------------------------------------------------------
// Validation

/// Declaration order is the tie-break order within one region.
enum class ViolationCode : std::uint8_t {
  InvalidMaxRegions,
  ArchMismatch,
  TooManyRegions,
  RegionNumberOutOfRange,
  DuplicateNumber,
  SizeOutOfRange,
  MinSize,
  Misaligned,
  SrdOnSmallRegion,
  AllSubregionsDisabled,
  V8Misaligned,
  V8StartAfterLimit,
  V8Overlap,
};

std::string_view to_string(ViolationCode code) noexcept;
std::optional<ViolationCode> parse_violation_code(std::string_view text);

struct Violation {
  /// Absent for config-wide violations, which sort first.
  std::optional<unsigned> region;
  ViolationCode code;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every invariant violation, ordered by region number then code. Empty iff the
/// config is well-formed.
[[nodiscard]] std::vector<Violation> validate_config(const MpuConfig& config);

/// Violations of a single v7 region in isolation (no number-range check).
[[nodiscard]] std::vector<Violation> validate_region(const V7Region& region);

// ---------------------------------------------------------------------------
// Access resolution

struct AccessQuery {
  std::uint32_t address = 0;
  Mode mode = Mode::Unprivileged;
  AccessKind kind = AccessKind::Read;
};

enum class Verdict : std::uint8_t { Allow, Fault };
/// MpuDisabledPolicy is reserved: a disabled MPU allows every access.
enum class FaultReason : std::uint8_t { NoMatchingRegion, PermissionDenied, MpuDisabledPolicy };

std::string_view to_string(Verdict verdict) noexcept;
std::string_view to_string(FaultReason reason) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text);
std::optional<FaultReason> parse_fault_reason(std::string_view text);

struct AccessDecision {
  Verdict verdict = Verdict::Allow;
  std::optional<FaultReason> fault_reason;
  /// Absent when the background map (or a disabled MPU) decided.
  std::optional<unsigned> matched_region;

  [[nodiscard]] bool allowed() const { return verdict == Verdict::Allow; }

  friend bool operator==(const AccessDecision&, const AccessDecision&) = default;
};

/// A validated configuration prepared for repeated queries. Construction throws
/// Error(InvalidConfig) when validate_config reports anything.
class Resolver {
 public:
  explicit Resolver(MpuConfig config);

  [[nodiscard]] AccessDecision resolve(const AccessQuery& query) const;
  /// The rights each mode would be granted at `address`.
  [[nodiscard]] PermissionSet effective(std::uint32_t address) const;
  /// Number of the region deciding accesses at `address`, if any.
  [[nodiscard]] std::optional<unsigned> matching_region(std::uint32_t address) const;
  [[nodiscard]] const MpuConfig& config() const { return config_; }

 private:
  struct Entry {
    unsigned number;
    std::uint64_t base;
    std::uint64_t size;
    std::uint64_t subregion_size;  // 0 when the region has no sub-regions
    std::uint8_t srd_mask;
    PermissionSet perms;
  };

  const Entry* match(std::uint64_t address) const;

  MpuConfig config_;
  std::vector<Entry> entries_;  // enabled regions, highest number first
};

/// Pure single-shot form of Resolver::resolve.
[[nodiscard]] AccessDecision resolve_access(const MpuConfig& config, const AccessQuery& query);

// ---------------------------------------------------------------------------
// v7 register encoding

struct V7Encoding {
  std::uint32_t bar = 0;
  std::uint32_t basr = 0;

  friend constexpr bool operator==(V7Encoding, V7Encoding) = default;
};

namespace v7reg {
inline constexpr std::uint32_t kBarAddrMask = 0xFFFFFFE0U;
inline constexpr std::uint32_t kBarValid = 1U << 4;
inline constexpr std::uint32_t kBarRegionMask = 0xFU;

inline constexpr unsigned kBasrXnShift = 28;
inline constexpr unsigned kBasrApShift = 24;
inline constexpr std::uint32_t kBasrApMask = 0x7U << kBasrApShift;
inline constexpr unsigned kBasrAttrShift = 16;
inline constexpr std::uint32_t kBasrAttrMask = 0x3FU << kBasrAttrShift;
inline constexpr unsigned kBasrSrdShift = 8;
inline constexpr std::uint32_t kBasrSrdMask = 0xFFU << kBasrSrdShift;
inline constexpr unsigned kBasrSizeShift = 1;
inline constexpr std::uint32_t kBasrSizeMask = 0x1FU << kBasrSizeShift;
inline constexpr std::uint32_t kBasrEnable = 1U;
inline constexpr std::uint32_t kBasrReservedMask =
    ~((1U << kBasrXnShift) | kBasrApMask | kBasrAttrMask | kBasrSrdMask | kBasrSizeMask |
      kBasrEnable);
}  // namespace v7reg

/// AP field value for `perms`, ignoring execute. Empty when no AP code matches.
[[nodiscard]] std::optional<std::uint8_t> access_permission_bits(const PermissionSet& perms);
/// Rights granted by an AP/XN pair. Empty for the reserved AP value 0b100.
[[nodiscard]] std::optional<PermissionSet> permissions_from_bits(std::uint8_t ap, bool xn);

/// Throws Error(InvalidRegion) when the region breaks its invariants and
/// Error(InexpressiblePermissions) when perms have no AP/XN encoding.
[[nodiscard]] V7Encoding encode_v7(const V7Region& region);
/// Throws Error(MalformedEncoding) on reserved bits, VALID clear, SIZE < 4 or AP = 0b100.
[[nodiscard]] V7Region decode_v7(std::uint32_t bar, std::uint32_t basr);

// ---------------------------------------------------------------------------
// Enumeration

struct EffectiveRange {
  AddressRange range;
  PermissionSet perms;

  friend bool operator==(const EffectiveRange&, const EffectiveRange&) = default;
};

/// Addresses where rights can change: region and sub-region edges. Sorted, unique.
[[nodiscard]] std::vector<std::uint64_t> decision_boundaries(const MpuConfig& config);

/// Run-length-merged partition of `universe` into ranges whose six
/// (mode x kind) decisions agree. Each granule takes the decisions of its first
/// byte. Requires granularity >= 32 dividing universe.size; throws
/// Error(InvalidArgument) otherwise and Error(InvalidConfig) on an invalid config.
[[nodiscard]] std::vector<EffectiveRange> enumerate_effective_permissions(
    const MpuConfig& config, const AddressRange& universe,
    std::uint64_t granularity = kDefaultGranularity);

}  // namespace mpulab::mpu
