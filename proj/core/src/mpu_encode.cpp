//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <array>

#include "mpulab/error.hpp"
#include "mpulab/mpu.hpp"

namespace mpulab::mpu {
namespace {

constexpr Rights kNone{};
constexpr Rights kRo{Rights::kRead};
constexpr Rights kRw{Rights::kRead | Rights::kWrite};

struct ApRow {
  std::uint8_t ap;
  Rights privileged;
  Rights unprivileged;
};

// Read/write rights per AP value. 0b100 is reserved; 0b111 duplicates 0b110
// and is never produced by the encoder.
constexpr std::array<ApRow, 7> kApTable = {{
    {0b000, kNone, kNone},
    {0b001, kRw, kNone},
    {0b010, kRw, kRo},
    {0b011, kRw, kRw},
    {0b101, kRo, kNone},
    {0b110, kRo, kRo},
    {0b111, kRo, kRo},
}};

}  // namespace

std::optional<std::uint8_t> access_permission_bits(const PermissionSet& perms) {
  const Rights priv = perms.privileged & kRw;
  const Rights unpriv = perms.unprivileged & kRw;
  for (const auto& row : kApTable) {
    if (row.privileged == priv && row.unprivileged == unpriv) return row.ap;
  }
  return std::nullopt;
}

std::optional<PermissionSet> permissions_from_bits(std::uint8_t ap, bool xn) {
  for (const auto& row : kApTable) {
    if (row.ap != ap) continue;
    // XN applies to every mode that can read at all.
    const Rights exec = xn ? kNone : Rights{Rights::kExecute};
    PermissionSet out{row.privileged, row.unprivileged};
    if (row.privileged.read()) out.privileged |= exec;
    if (row.unprivileged.read()) out.unprivileged |= exec;
    return out;
  }
  return std::nullopt;
}

V7Encoding encode_v7(const V7Region& region) {
  if (auto violations = validate_region(region); !violations.empty()) {
    throw Error(Errc::InvalidRegion, "region " + std::to_string(region.number) + ": " +
                                         std::string(to_string(violations.front().code)));
  }
  if (region.number > v7reg::kBarRegionMask) {
    throw Error(Errc::InvalidRegion,
                "region number " + std::to_string(region.number) + " does not fit REGION[3:0]");
  }
  if (region.attrs.raw > (v7reg::kBasrAttrMask >> v7reg::kBasrAttrShift)) {
    throw Error(Errc::InvalidRegion, "attribute bits exceed BASR[21:16]");
  }

  auto ap = access_permission_bits(region.perms);
  if (!ap) {
    throw Error(Errc::InexpressiblePermissions,
                "no AP value grants privileged " + region.perms.privileged.str() +
                    " / unprivileged " + region.perms.unprivileged.str());
  }
  // Try both XN settings; whichever reproduces perms exactly is the encoding.
  std::optional<bool> xn;
  for (bool candidate : {true, false}) {
    if (permissions_from_bits(*ap, candidate) == region.perms) {
      xn = candidate;
      break;
    }
  }
  if (!xn) {
    throw Error(Errc::InexpressiblePermissions,
                "execute rights privileged " + region.perms.privileged.str() + " / unprivileged " +
                    region.perms.unprivileged.str() + " need distinct XN per mode");
  }

  V7Encoding out;
  out.bar = (region.base & v7reg::kBarAddrMask) | v7reg::kBarValid |
            (region.number & v7reg::kBarRegionMask);
  out.basr = (static_cast<std::uint32_t>(*xn) << v7reg::kBasrXnShift) |
             (static_cast<std::uint32_t>(*ap) << v7reg::kBasrApShift) |
             (static_cast<std::uint32_t>(region.attrs.raw) << v7reg::kBasrAttrShift) |
             (static_cast<std::uint32_t>(region.srd_mask) << v7reg::kBasrSrdShift) |
             (static_cast<std::uint32_t>(region.size_exponent) << v7reg::kBasrSizeShift) |
             (region.enabled ? v7reg::kBasrEnable : 0U);
  return out;
}

V7Region decode_v7(std::uint32_t bar, std::uint32_t basr) {
  if ((bar & v7reg::kBarValid) == 0) {
    throw Error(Errc::MalformedEncoding, "BAR VALID bit clear; region number not carried");
  }
  if (basr & v7reg::kBasrReservedMask) {
    throw Error(Errc::MalformedEncoding, "BASR reserved bits set: " + hex32(basr));
  }
  const auto size_field =
      static_cast<std::uint8_t>((basr & v7reg::kBasrSizeMask) >> v7reg::kBasrSizeShift);
  if (size_field < 4) {
    throw Error(Errc::MalformedEncoding,
                "SIZE field " + std::to_string(size_field) + " below the 32-byte minimum");
  }
  const auto ap = static_cast<std::uint8_t>((basr & v7reg::kBasrApMask) >> v7reg::kBasrApShift);
  const bool xn = (basr >> v7reg::kBasrXnShift) & 1U;
  auto perms = permissions_from_bits(ap, xn);
  if (!perms) throw Error(Errc::MalformedEncoding, "reserved AP value 0b100");

  V7Region r;
  r.number = bar & v7reg::kBarRegionMask;
  r.base = bar & v7reg::kBarAddrMask;
  r.size_exponent = size_field;
  r.srd_mask = static_cast<std::uint8_t>((basr & v7reg::kBasrSrdMask) >> v7reg::kBasrSrdShift);
  r.perms = *perms;
  r.attrs.raw = static_cast<std::uint8_t>((basr & v7reg::kBasrAttrMask) >> v7reg::kBasrAttrShift);
  r.enabled = (basr & v7reg::kBasrEnable) != 0;
  return r;
}

}  // namespace mpulab::mpu
