//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mpulab/audit.hpp"
#include "mpulab/layout.hpp"
#include "mpulab/mpu.hpp"
#include "mpulab/overhead.hpp"

namespace mpulab::testing {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kUniverseSize = 64 * 1024;
inline constexpr std::size_t kPropertyCases = 1000;

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi);  // inclusive
bool chance(Rng& rng, double p);

Rights random_rights(Rng& rng);
PermissionSet random_perms(Rng& rng);

/// Every permission set some AP/XN pair expresses.
const std::vector<PermissionSet>& expressible_perms();

/// A valid v7 region (number 0..15, any size, naturally aligned).
mpu::V7Region random_v7_region(Rng& rng);

struct ConfigShape {
  unsigned max_count = 8;
  /// Largest region size exponent; 15 keeps regions inside a 64 KiB window.
  unsigned max_exponent = 16;
  /// Round every region edge to this many bytes (for granularity tests).
  std::uint64_t edge_alignment = 32;
  double enabled_probability = 0.9;
  double mpu_enabled_probability = 0.97;
};

/// A valid v7 config whose regions crowd the 64 KiB window at address 0.
mpu::MpuConfig random_v7_config(Rng& rng, const ConfigShape& shape = {});

/// Painter's-algorithm evaluation written directly from the architecture
/// rules: regions are applied lowest number first, later ones overwrite.
mpu::Verdict reference_verdict(const mpu::MpuConfig& config, std::uint64_t address, Mode mode,
                               AccessKind kind);
/// Number of the region painted last over `address`, if any.
std::optional<unsigned> reference_region(const mpu::MpuConfig& config, std::uint64_t address);

std::vector<overhead::Event> random_trace(Rng& rng, std::size_t max_events,
                                          const std::vector<std::string>& tasks);

std::vector<layout::SectionDescriptor> random_sections(Rng& rng, unsigned max_count);

// Property checks. Each runs one random case and returns a failure
// description, or nothing when the property holds.
std::optional<std::string> check_precedence(Rng& rng);
std::optional<std::string> check_fall_through(Rng& rng);
std::optional<std::string> check_background_asymmetry(Rng& rng);
std::optional<std::string> check_strategy_dominance(Rng& rng);
std::optional<std::string> check_cluster_monotonicity(Rng& rng);
/// Runs enumerate_effective_permissions and resolve_access against the
/// reference evaluator at every 32-byte granule of the window.
std::optional<std::string> check_resolution_oracle(Rng& rng);
std::optional<std::string> check_round_trip(Rng& rng);

struct PropertyResult {
  std::size_t cases = 0;
  std::optional<std::string> failure;
};
PropertyResult run_property(std::optional<std::string> (*check)(Rng&), std::uint64_t seed,
                            std::size_t cases = kPropertyCases);

/// Every size tuple (1..8 KiB steps) with every context labeling, up to
/// `max_requests` requests. Calls `fn` for each instance.
template <typename Fn>
void for_each_desk_instance(std::size_t max_requests, Fn&& fn);

}  // namespace mpulab::testing

#include "test_support_inl.hpp"
