//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>

#include "mpulab/error.hpp"
#include "mpulab/mpu.hpp"

namespace mpulab::mpu {

std::vector<std::uint64_t> decision_boundaries(const MpuConfig& config) {
  std::vector<std::uint64_t> out;
  if (!config.mpu_enabled) return out;
  if (const auto* v7 = std::get_if<V7Regions>(&config.regions)) {
    for (const auto& r : *v7) {
      if (!r.enabled || r.size_exponent > 31) continue;
      if (r.has_subregions()) {
        for (unsigned i = 0; i <= kSubregionCount; ++i) {
          out.push_back(std::uint64_t{r.base} + i * r.subregion_size());
        }
      } else {
        out.push_back(r.base);
        out.push_back(std::uint64_t{r.base} + r.size());
      }
    }
  } else {
    for (const auto& r : std::get<V8Regions>(config.regions)) {
      if (!r.enabled) continue;
      out.push_back(r.start);
      out.push_back(std::uint64_t{r.limit} + 1);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EffectiveRange> enumerate_effective_permissions(const MpuConfig& config,
                                                            const AddressRange& universe,
                                                            std::uint64_t granularity) {
  if (!universe.valid()) throw Error(Errc::InvalidArgument, "universe range is empty or wraps");
  if (granularity < kMinRegionSize || universe.size % granularity != 0) {
    throw Error(Errc::InvalidArgument, "granularity " + std::to_string(granularity) +
                                           " must be >= 32 and divide the universe size");
  }
  const Resolver resolver(config);

  // Decisions are constant between boundaries, so sampling one granule per
  // boundary-delimited segment is exact. A boundary inside a granule takes
  // effect at the next granule start.
  std::vector<std::uint64_t> starts{universe.base};
  for (auto b : decision_boundaries(config)) {
    if (b <= universe.base || b >= universe.end()) continue;
    auto offset = b - universe.base;
    auto aligned = universe.base + (offset + granularity - 1) / granularity * granularity;
    if (aligned < universe.end()) starts.push_back(aligned);
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  std::vector<EffectiveRange> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto end = i + 1 < starts.size() ? starts[i + 1] : universe.end();
    const auto perms = resolver.effective(static_cast<std::uint32_t>(starts[i]));
    if (!out.empty() && out.back().perms == perms) {
      out.back().range.size = end - out.back().range.base;
    } else {
      out.push_back({{starts[i], end - starts[i]}, perms});
    }
  }
  return out;
}

}  // namespace mpulab::mpu
