//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mpulab/mpu.hpp"
#include "mpulab/permissions.hpp"

namespace mpulab::layout {

struct Floating {
  friend constexpr bool operator==(Floating, Floating) = default;
};
struct Fixed {
  std::uint32_t base = 0;
  friend constexpr bool operator==(Fixed, Fixed) = default;
};
using Placement = std::variant<Floating, Fixed>;

/// A block of memory one context (task) must see with `perms`.
struct AllocationRequest {
  std::string id;
  std::uint64_t size = 0;
  PermissionSet perms;
  Placement placement = Floating{};
  std::string context;

  friend bool operator==(const AllocationRequest&, const AllocationRequest&) = default;
};

struct PackingPlan {
  std::map<std::string, AddressRange> placements;
  /// Region configuration loaded while each context runs; list type follows arch.
  std::map<std::string, mpu::RegionList> per_context_regions;
  unsigned regions_used = 0;
  /// Bytes enabled for some context but holding none of its requests.
  std::uint64_t waste_bytes = 0;
  /// Waste of giving every request its own next-power-of-two region.
  std::uint64_t naive_waste_bytes = 0;

  friend bool operator==(const PackingPlan&, const PackingPlan&) = default;
};

struct PackOptions {
  std::uint32_t arena_base = 0x20000000;
};

/// Greedy first-fit-decreasing packing. Every request costs one region in its
/// own context; requests of different contexts share one hardware block by
/// taking disjoint sub-region runs, so the active context sees only its own.
/// Throws Error(RegionBudgetExhausted) when a context needs more regions than
/// `region_budget`, Error(UnsatisfiableFixedPlacement) on conflicting or
/// unplaceable fixed requests, Error(InvalidArgument) on zero sizes or budget.
[[nodiscard]] PackingPlan pack_regions(std::span<const AllocationRequest> requests,
                                       mpu::Arch arch, unsigned region_budget,
                                       const PackOptions& options = {});

/// Exhaustive optimum over request-to-block assignments, block sizes and
/// sub-region runs. Floating requests only; at most five, each a multiple of
/// 1 KiB no larger than 8 KiB.
[[nodiscard]] PackingPlan brute_force_pack(std::span<const AllocationRequest> requests,
                                           mpu::Arch arch, unsigned region_budget,
                                           const PackOptions& options = {});

[[nodiscard]] std::uint64_t naive_waste(std::span<const AllocationRequest> requests);

/// Least waste a request of `size` bytes can have in a v7 region of size
/// 2^(exponent+1), or nullopt when it does not fit.
[[nodiscard]] std::optional<std::uint64_t> v7_run_waste(std::uint64_t size, unsigned exponent);

/// The MPU configuration a context runs under. Background is off so that every
/// byte outside the context's regions faults in both modes.
[[nodiscard]] mpu::MpuConfig context_config(const PackingPlan& plan, const std::string& context,
                                            mpu::Arch arch);

// ---------------------------------------------------------------------------
// Exact range covering

/// v7 regions whose union is exactly `range`, numbered from 0. Without SRD
/// this is the aligned power-of-two decomposition, which is minimal. With SRD
/// each step greedily takes the longest sub-region run starting at the cursor.
/// `range` must be 32-byte aligned at both ends.
[[nodiscard]] mpu::V7Regions cover_range_v7(const AddressRange& range, PermissionSet perms,
                                            bool use_subregions);
[[nodiscard]] mpu::V8Regions cover_range_v8(const AddressRange& range, PermissionSet perms);

// ---------------------------------------------------------------------------
// Peripheral covering

struct PeripheralSpec {
  std::string id;
  AddressRange range;
  /// Privileged-only when set.
  bool is_protected = false;

  friend bool operator==(const PeripheralSpec&, const PeripheralSpec&) = default;
};

struct CoverPlan {
  mpu::RegionList privileged_view;
  mpu::RegionList unprivileged_view;
  std::vector<std::string> uncovered;

  friend bool operator==(const CoverPlan&, const CoverPlan&) = default;
};

/// Covers runs of adjacent same-size peripherals with one region each, using
/// one sub-region per peripheral; the unprivileged view disables the
/// sub-regions of protected peripherals. Peripherals that cannot be expressed
/// or do not fit in `region_budget` are listed in `uncovered`.
[[nodiscard]] CoverPlan cover_peripherals(std::span<const PeripheralSpec> peripherals,
                                          mpu::Arch arch, unsigned region_budget = 8);

// ---------------------------------------------------------------------------
// Section clustering

struct SectionDescriptor {
  std::string id;
  AddressRange range;
  PermissionSet perms;

  friend bool operator==(const SectionDescriptor&, const SectionDescriptor&) = default;
};

struct Cluster {
  std::vector<std::string> members;
  AddressRange range;
  PermissionSet perms;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Seed for k-means++ initialisation; restart r of k clusters draws from
/// mt19937_64(kClusterSeed + 1000 * k + r).
inline constexpr std::uint64_t kClusterSeed = 0x6d70756c6162ULL;
inline constexpr unsigned kClusterRestarts = 8;
inline constexpr double kAddressGapWeight = 0.25;

/// At most `max_regions` clusters with unioned permissions, chosen by k-means
/// (Hamming distance on the six permission bits plus a weighted normalized
/// address gap) run for every k up to `max_regions`. Keeps the lowest
/// over-grant score, then the fewest clusters.
[[nodiscard]] std::vector<Cluster> cluster_sections(std::span<const SectionDescriptor> sections,
                                                    unsigned max_regions);

/// Sum over sections of bytes times permission bits granted by the section's
/// cluster beyond its own.
[[nodiscard]] std::uint64_t over_grant_score(std::span<const SectionDescriptor> sections,
                                             std::span<const Cluster> clusters);

}  // namespace mpulab::layout
