//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <bit>

#include "mpulab/error.hpp"
#include "mpulab/layout.hpp"

namespace mpulab::layout {
namespace {

const PermissionSet kPeripheralPerms{Rights{Rights::kRead | Rights::kWrite},
                                     Rights{Rights::kRead | Rights::kWrite}};

std::uint8_t exponent_of(std::uint64_t pow2_size) {
  return static_cast<std::uint8_t>(std::countr_zero(pow2_size) - 1);
}

using Run = std::vector<const PeripheralSpec*>;

CoverPlan cover_v7(const std::vector<const PeripheralSpec*>& sorted, unsigned budget) {
  mpu::V7Regions privileged;
  mpu::V7Regions unprivileged;
  std::vector<std::string> uncovered;

  auto add_region = [&](mpu::V7Region priv, bool unpriv_enabled, std::uint8_t unpriv_mask) {
    priv.number = static_cast<unsigned>(privileged.size());
    priv.perms = kPeripheralPerms;
    mpu::V7Region user = priv;
    user.srd_mask = unpriv_mask;
    // A fully masked region must be switched off instead.
    user.enabled = unpriv_enabled && unpriv_mask != 0xFF;
    privileged.push_back(priv);
    unprivileged.push_back(user);
  };

  // Maximal runs of adjacent, equal-size peripherals.
  std::vector<Run> runs;
  for (const auto* p : sorted) {
    if (!runs.empty() && runs.back().back()->range.end() == p->range.base &&
        runs.back().back()->range.size == p->range.size) {
      runs.back().push_back(p);
    } else {
      runs.push_back({p});
    }
  }

  for (const auto& run : runs) {
    const auto size = run.front()->range.size;
    const bool expressible = std::has_single_bit(size) && size >= mpu::kMinRegionSize &&
                             run.front()->range.base % size == 0;
    if (!expressible) {
      for (const auto* p : run) uncovered.push_back(p->id);
      continue;
    }
    // One region per 8x-aligned block the run touches, one sub-region per
    // peripheral. A lone peripheral gets an exact-size region instead.
    const std::uint64_t block = size * mpu::kSubregionCount;
    std::size_t i = 0;
    while (i < run.size()) {
      std::size_t j = i + 1;
      const bool can_group = block <= kAddressSpaceEnd;
      const auto block_base = can_group ? run[i]->range.base / block * block : 0;
      while (can_group && j < run.size() && run[j]->range.base < block_base + block) ++j;

      if (privileged.size() >= budget) {
        for (std::size_t k = i; k < j; ++k) uncovered.push_back(run[k]->id);
        i = j;
        continue;
      }
      mpu::V7Region region;
      if (j - i == 1) {
        region.base = static_cast<std::uint32_t>(run[i]->range.base);
        region.size_exponent = exponent_of(size);
        add_region(region, !run[i]->is_protected, 0);
      } else {
        std::uint8_t present = 0;
        std::uint8_t open = 0;
        for (std::size_t k = i; k < j; ++k) {
          const auto index = static_cast<unsigned>((run[k]->range.base - block_base) / size);
          present = static_cast<std::uint8_t>(present | (1U << index));
          if (!run[k]->is_protected) open = static_cast<std::uint8_t>(open | (1U << index));
        }
        region.base = static_cast<std::uint32_t>(block_base);
        region.size_exponent = exponent_of(block);
        region.srd_mask = static_cast<std::uint8_t>(~present);
        add_region(region, true, static_cast<std::uint8_t>(~open));
      }
      i = j;
    }
  }
  return {std::move(privileged), std::move(unprivileged), std::move(uncovered)};
}

CoverPlan cover_v8(const std::vector<const PeripheralSpec*>& sorted, unsigned budget) {
  mpu::V8Regions privileged;
  mpu::V8Regions unprivileged;
  std::vector<std::string> uncovered;

  auto aligned = [](const PeripheralSpec* p) {
    return p->range.base % mpu::kMinRegionSize == 0 && p->range.end() % mpu::kMinRegionSize == 0;
  };
  // v8 needs no equal sizes: any adjacent 32-byte granular run is one region.
  std::vector<Run> runs;
  for (const auto* p : sorted) {
    if (!aligned(p)) {
      uncovered.push_back(p->id);
      continue;
    }
    if (!runs.empty() && runs.back().back()->range.end() == p->range.base) {
      runs.back().push_back(p);
    } else {
      runs.push_back({p});
    }
  }

  auto make = [](std::uint64_t start, std::uint64_t end) {
    mpu::V8Region r;
    r.start = static_cast<std::uint32_t>(start);
    r.limit = static_cast<std::uint32_t>(end - 1);
    r.perms = kPeripheralPerms;
    return r;
  };

  for (const auto& run : runs) {
    std::vector<mpu::V8Region> open;
    for (const auto* p : run) {
      if (p->is_protected) continue;
      if (!open.empty() && std::uint64_t{open.back().limit} + 1 == p->range.base) {
        open.back().limit = static_cast<std::uint32_t>(p->range.last());
      } else {
        open.push_back(make(p->range.base, p->range.end()));
      }
    }
    if (privileged.size() + 1 > budget || unprivileged.size() + open.size() > budget) {
      for (const auto* p : run) uncovered.push_back(p->id);
      continue;
    }
    auto whole = make(run.front()->range.base, run.back()->range.end());
    whole.number = static_cast<unsigned>(privileged.size());
    privileged.push_back(whole);
    for (auto& r : open) {
      r.number = static_cast<unsigned>(unprivileged.size());
      unprivileged.push_back(r);
    }
  }
  return {std::move(privileged), std::move(unprivileged), std::move(uncovered)};
}

}  // namespace

CoverPlan cover_peripherals(std::span<const PeripheralSpec> peripherals, mpu::Arch arch,
                            unsigned region_budget) {
  std::vector<const PeripheralSpec*> sorted;
  for (const auto& p : peripherals) {
    if (!p.range.valid()) {
      throw Error(Errc::InvalidArgument, "peripheral '" + p.id + "' has an invalid range");
    }
    sorted.push_back(&p);
  }
  std::sort(sorted.begin(), sorted.end(), [](const PeripheralSpec* a, const PeripheralSpec* b) {
    return a->range.base < b->range.base;
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1]->range.overlaps(sorted[i]->range)) {
      throw Error(Errc::InvalidArgument,
                  "peripherals '" + sorted[i - 1]->id + "' and '" + sorted[i]->id + "' overlap");
    }
  }
  return arch == mpu::Arch::V7 ? cover_v7(sorted, region_budget) : cover_v8(sorted, region_budget);
}

}  // namespace mpulab::layout
