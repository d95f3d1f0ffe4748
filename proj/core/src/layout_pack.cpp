//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <set>

#include "layout_common.hpp"
#include "mpulab/error.hpp"
#include "mpulab/layout.hpp"

namespace mpulab::layout {

using mpu::Arch;
using mpu::V7Region;
using mpu::V8Region;

namespace detail {

void check_requests(std::span<const AllocationRequest> requests, unsigned region_budget) {
  if (region_budget < 1 || region_budget > 16) {
    throw Error(Errc::InvalidArgument,
                "region budget " + std::to_string(region_budget) + " outside 1..16");
  }
  std::set<std::string> ids;
  std::map<std::string, unsigned> per_context;
  for (const auto& r : requests) {
    if (r.size == 0 || r.size > kAddressSpaceEnd) {
      throw Error(Errc::InvalidArgument, "request '" + r.id + "' has invalid size");
    }
    if (!ids.insert(r.id).second) {
      throw Error(Errc::InvalidArgument, "duplicate request id '" + r.id + "'");
    }
    ++per_context[r.context];
  }
  for (const auto& [context, count] : per_context) {
    if (count > region_budget) {
      throw Error(Errc::RegionBudgetExhausted,
                  "context '" + context + "' needs " + std::to_string(count) +
                      " regions but only " + std::to_string(region_budget) + " are available");
    }
  }
}

unsigned regions_used(std::span<const AllocationRequest> requests) {
  std::map<std::string, unsigned> per_context;
  unsigned most = 0;
  for (const auto& r : requests) most = std::max(most, ++per_context[r.context]);
  return most;
}

void number_regions(PackingPlan& plan) {
  for (auto& [context, list] : plan.per_context_regions) {
    std::visit(
        [](auto& regions) {
          std::sort(regions.begin(), regions.end(), [](const auto& a, const auto& b) {
            return a.range().base < b.range().base;
          });
          for (unsigned i = 0; i < regions.size(); ++i) regions[i].number = i;
        },
        list);
  }
}

std::uint64_t align_up(std::uint64_t value, std::uint64_t alignment) {
  return (value + alignment - 1) / alignment * alignment;
}

}  // namespace detail

namespace {

constexpr unsigned kMinExponent = 4;
constexpr unsigned kMaxExponent = 31;

std::uint64_t block_size(unsigned exponent) { return std::uint64_t{1} << (exponent + 1); }

// A hardware block shared across contexts. Sub-region i belongs to request
// owner[i]; blocks without sub-regions have a single owner in owner[0].
struct Block {
  std::uint64_t base = 0;
  unsigned exponent = kMinExponent;
  bool floating = true;
  std::array<int, mpu::kSubregionCount> owner{-1, -1, -1, -1, -1, -1, -1, -1};
  std::set<std::string> contexts;

  std::uint64_t size() const { return block_size(exponent); }
  bool subdivided() const { return size() >= mpu::kMinSubregionRegionSize; }
  std::uint64_t subregion_size() const { return size() / mpu::kSubregionCount; }
  AddressRange range() const { return {base, size()}; }
};

struct Slot {
  std::size_t block = 0;
  unsigned first = 0;
  unsigned count = 0;
  std::uint64_t waste = 0;
};

std::optional<unsigned> free_run(const Block& block, unsigned count) {
  for (unsigned start = 0; start + count <= mpu::kSubregionCount; ++start) {
    bool free = true;
    for (unsigned i = start; i < start + count; ++i) free = free && block.owner[i] < 0;
    if (free) return start;
  }
  return std::nullopt;
}

struct FixedChoice {
  std::uint64_t block_base;
  unsigned exponent;
  unsigned first;
  unsigned count;
  std::uint64_t waste;
};

// Smallest-waste block holding [base, base + size), ties to the smaller block.
std::optional<FixedChoice> fixed_choice(std::uint64_t base, std::uint64_t size) {
  std::optional<FixedChoice> best;
  for (unsigned e = kMinExponent; e <= kMaxExponent; ++e) {
    const auto s = block_size(e);
    if (s < size) continue;
    const auto block_base = base & ~(s - 1);
    if (base + size > block_base + s) continue;
    FixedChoice c{block_base, e, 0, 1, s - size};
    if (s >= mpu::kMinSubregionRegionSize) {
      const auto sub = s / mpu::kSubregionCount;
      c.first = static_cast<unsigned>((base - block_base) / sub);
      const auto last = static_cast<unsigned>((base + size - 1 - block_base) / sub);
      c.count = last - c.first + 1;
      c.waste = c.count * sub - size;
    }
    if (!best || c.waste < best->waste) best = c;
  }
  return best;
}

AddressRange slot_range(const Block& block, const Slot& slot) {
  if (!block.subdivided()) return block.range();
  return {block.base + slot.first * block.subregion_size(), slot.count * block.subregion_size()};
}

PackingPlan pack_v7(std::span<const AllocationRequest> requests, const PackOptions& options) {
  std::vector<Block> blocks;
  std::vector<Slot> slots(requests.size());

  auto claim = [&](std::size_t request, std::size_t block_index, unsigned first, unsigned count,
                   std::uint64_t waste) {
    auto& block = blocks[block_index];
    for (unsigned i = first; i < first + count; ++i) block.owner[i] = static_cast<int>(request);
    block.contexts.insert(requests[request].context);
    slots[request] = {block_index, first, count, waste};
  };

  // Fixed requests first, in input order.
  std::vector<AddressRange> fixed_runs;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto* fixed = std::get_if<Fixed>(&requests[i].placement);
    if (!fixed) continue;
    const AddressRange wanted{fixed->base, requests[i].size};
    if (!wanted.valid()) {
      throw Error(Errc::UnsatisfiableFixedPlacement,
                  "request '" + requests[i].id + "' runs past the address space");
    }
    auto choice = fixed_choice(fixed->base, requests[i].size);
    if (!choice) {
      throw Error(Errc::UnsatisfiableFixedPlacement,
                  "no region can hold request '" + requests[i].id + "'");
    }
    Block candidate;
    candidate.base = choice->block_base;
    candidate.exponent = choice->exponent;
    candidate.floating = false;
    const Slot probe{0, choice->first, choice->count, choice->waste};
    const auto run = slot_range(candidate, probe);
    for (const auto& other : fixed_runs) {
      if (run.overlaps(other)) {
        throw Error(Errc::UnsatisfiableFixedPlacement,
                    "request '" + requests[i].id + "' at " + hex32(fixed->base) +
                        " collides with another fixed request");
      }
    }
    fixed_runs.push_back(run);

    auto shared = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) {
      return !b.floating && b.base == candidate.base && b.exponent == candidate.exponent &&
             b.subdivided() && !b.contexts.contains(requests[i].context);
    });
    std::size_t index = static_cast<std::size_t>(shared - blocks.begin());
    if (shared == blocks.end()) {
      blocks.push_back(candidate);
      index = blocks.size() - 1;
    }
    claim(i, index, choice->first, choice->count, choice->waste);
  }

  // Floating requests, largest first.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (std::holds_alternative<Floating>(requests[i].placement)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return requests[a].size > requests[b].size;
  });

  for (auto i : order) {
    const auto& req = requests[i];
    std::uint64_t best_waste = ~std::uint64_t{0};
    for (unsigned e = kMinExponent; e <= kMaxExponent; ++e) {
      if (auto w = v7_run_waste(req.size, e)) best_waste = std::min(best_waste, *w);
    }

    bool placed = false;
    for (std::size_t b = 0; b < blocks.size() && !placed; ++b) {
      auto& block = blocks[b];
      if (!block.floating || !block.subdivided() || block.contexts.contains(req.context)) continue;
      auto w = v7_run_waste(req.size, block.exponent);
      if (!w || *w != best_waste) continue;
      const auto count =
          static_cast<unsigned>((req.size + block.subregion_size() - 1) / block.subregion_size());
      if (auto start = free_run(block, count)) {
        claim(i, b, *start, count, *w);
        placed = true;
      }
    }
    if (placed) continue;

    unsigned exponent = kMinExponent;
    while (v7_run_waste(req.size, exponent) != best_waste) ++exponent;
    Block block;
    block.exponent = exponent;
    // Lowest aligned address at or above the arena base clear of every block.
    std::uint64_t candidate = detail::align_up(options.arena_base, block.size());
    for (bool moved = true; moved;) {
      moved = false;
      for (const auto& other : blocks) {
        if (AddressRange{candidate, block.size()}.overlaps(other.range())) {
          candidate = detail::align_up(other.range().end(), block.size());
          moved = true;
        }
      }
    }
    if (candidate + block.size() > kAddressSpaceEnd) {
      throw Error(Errc::InvalidArgument, "arena exhausted placing request '" + req.id + "'");
    }
    block.base = candidate;
    blocks.push_back(block);
    const unsigned count =
        block.subdivided() ? static_cast<unsigned>((req.size + block.subregion_size() - 1) /
                                                   block.subregion_size())
                           : 1;
    claim(i, blocks.size() - 1, 0, count, best_waste);
  }

  PackingPlan plan;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& req = requests[i];
    const auto& block = blocks[slots[i].block];
    if (const auto* fixed = std::get_if<Fixed>(&req.placement)) {
      plan.placements[req.id] = {fixed->base, req.size};
    } else {
      plan.placements[req.id] = {slot_range(block, slots[i]).base, req.size};
    }

    V7Region region;
    region.base = static_cast<std::uint32_t>(block.base);
    region.size_exponent = static_cast<std::uint8_t>(block.exponent);
    if (block.subdivided()) {
      std::uint8_t enabled = 0;
      for (unsigned s = slots[i].first; s < slots[i].first + slots[i].count; ++s) {
        enabled = static_cast<std::uint8_t>(enabled | (1U << s));
      }
      region.srd_mask = static_cast<std::uint8_t>(~enabled);
    }
    region.perms = req.perms;
    auto [it, inserted] = plan.per_context_regions.try_emplace(req.context, mpu::V7Regions{});
    std::get<mpu::V7Regions>(it->second).push_back(region);
    plan.waste_bytes += slots[i].waste;
  }
  return plan;
}

PackingPlan pack_v8(std::span<const AllocationRequest> requests, const PackOptions& options) {
  std::vector<AddressRange> runs(requests.size());
  std::vector<AddressRange> taken;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto* fixed = std::get_if<Fixed>(&requests[i].placement);
    if (!fixed) continue;
    const AddressRange wanted{fixed->base, requests[i].size};
    const auto start = fixed->base / mpu::kMinRegionSize * mpu::kMinRegionSize;
    const auto end = detail::align_up(wanted.end(), mpu::kMinRegionSize);
    if (!wanted.valid() || end > kAddressSpaceEnd) {
      throw Error(Errc::UnsatisfiableFixedPlacement,
                  "request '" + requests[i].id + "' runs past the address space");
    }
    const AddressRange run{start, end - start};
    for (const auto& other : taken) {
      if (run.overlaps(other)) {
        throw Error(Errc::UnsatisfiableFixedPlacement,
                    "request '" + requests[i].id + "' collides with another fixed request");
      }
    }
    runs[i] = run;
    taken.push_back(run);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (std::holds_alternative<Floating>(requests[i].placement)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return requests[a].size > requests[b].size;
  });
  for (auto i : order) {
    const auto length = detail::align_up(requests[i].size, mpu::kMinRegionSize);
    std::uint64_t candidate = detail::align_up(options.arena_base, mpu::kMinRegionSize);
    for (bool moved = true; moved;) {
      moved = false;
      for (const auto& other : taken) {
        if (AddressRange{candidate, length}.overlaps(other)) {
          candidate = other.end();
          moved = true;
        }
      }
    }
    if (candidate + length > kAddressSpaceEnd) {
      throw Error(Errc::InvalidArgument, "arena exhausted placing request '" + requests[i].id + "'");
    }
    runs[i] = {candidate, length};
    taken.push_back(runs[i]);
  }

  PackingPlan plan;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& req = requests[i];
    const auto* fixed = std::get_if<Fixed>(&req.placement);
    plan.placements[req.id] = {fixed ? std::uint64_t{fixed->base} : runs[i].base, req.size};
    V8Region region;
    region.start = static_cast<std::uint32_t>(runs[i].base);
    region.limit = static_cast<std::uint32_t>(runs[i].last());
    region.perms = req.perms;
    auto [it, inserted] = plan.per_context_regions.try_emplace(req.context, mpu::V8Regions{});
    std::get<mpu::V8Regions>(it->second).push_back(region);
    plan.waste_bytes += runs[i].size - req.size;
  }
  return plan;
}

}  // namespace

std::optional<std::uint64_t> v7_run_waste(std::uint64_t size, unsigned exponent) {
  if (exponent < kMinExponent || exponent > kMaxExponent) return std::nullopt;
  const auto s = block_size(exponent);
  if (size == 0 || s < size) return std::nullopt;
  if (s < mpu::kMinSubregionRegionSize) return s - size;
  const auto sub = s / mpu::kSubregionCount;
  return (size + sub - 1) / sub * sub - size;
}

std::uint64_t naive_waste(std::span<const AllocationRequest> requests) {
  std::uint64_t total = 0;
  for (const auto& r : requests) {
    const auto rounded = std::bit_ceil(std::max<std::uint64_t>(r.size, mpu::kMinRegionSize));
    total += rounded - r.size;
  }
  return total;
}

PackingPlan pack_regions(std::span<const AllocationRequest> requests, Arch arch,
                         unsigned region_budget, const PackOptions& options) {
  detail::check_requests(requests, region_budget);
  PackingPlan plan = arch == Arch::V7 ? pack_v7(requests, options) : pack_v8(requests, options);
  detail::number_regions(plan);
  plan.regions_used = detail::regions_used(requests);
  plan.naive_waste_bytes = naive_waste(requests);
  return plan;
}

mpu::MpuConfig context_config(const PackingPlan& plan, const std::string& context, Arch arch) {
  auto it = plan.per_context_regions.find(context);
  if (it == plan.per_context_regions.end()) {
    throw Error(Errc::InvalidArgument, "plan has no context '" + context + "'");
  }
  mpu::MpuConfig config;
  config.arch = arch;
  config.regions = it->second;
  config.max_regions = arch == Arch::V8 || mpu::region_count(it->second) > 8 ? 16 : 8;
  config.background_enabled = false;
  return config;
}

mpu::V7Regions cover_range_v7(const AddressRange& range, PermissionSet perms,
                              bool use_subregions) {
  if (!range.valid() || range.base % mpu::kMinRegionSize != 0 ||
      range.end() % mpu::kMinRegionSize != 0) {
    throw Error(Errc::InvalidArgument, "range must be non-empty and 32-byte aligned");
  }
  mpu::V7Regions out;
  std::uint64_t cursor = range.base;
  while (cursor < range.end()) {
    V7Region best;
    std::uint64_t best_covered = 0;
    for (unsigned e = kMinExponent; e <= kMaxExponent; ++e) {
      const auto s = block_size(e);
      const auto block_base = cursor & ~(s - 1);
      if (block_base == cursor && cursor + s <= range.end() && s > best_covered) {
        best = V7Region{};
        best.base = static_cast<std::uint32_t>(cursor);
        best.size_exponent = static_cast<std::uint8_t>(e);
        best_covered = s;
      }
      if (!use_subregions || s < mpu::kMinSubregionRegionSize) continue;
      const auto sub = s / mpu::kSubregionCount;
      if ((cursor - block_base) % sub != 0) continue;
      const auto first = static_cast<unsigned>((cursor - block_base) / sub);
      const auto count = static_cast<unsigned>(
          std::min<std::uint64_t>(mpu::kSubregionCount - first, (range.end() - cursor) / sub));
      if (count == 0 || count * sub <= best_covered) continue;
      std::uint8_t enabled = 0;
      for (unsigned i = first; i < first + count; ++i) {
        enabled = static_cast<std::uint8_t>(enabled | (1U << i));
      }
      best = V7Region{};
      best.base = static_cast<std::uint32_t>(block_base);
      best.size_exponent = static_cast<std::uint8_t>(e);
      best.srd_mask = static_cast<std::uint8_t>(~enabled);
      best_covered = count * sub;
    }
    best.number = static_cast<unsigned>(out.size());
    best.perms = perms;
    out.push_back(best);
    cursor += best_covered;
  }
  return out;
}

mpu::V8Regions cover_range_v8(const AddressRange& range, PermissionSet perms) {
  if (!range.valid() || range.base % mpu::kMinRegionSize != 0 ||
      range.end() % mpu::kMinRegionSize != 0) {
    throw Error(Errc::InvalidArgument, "range must be non-empty and 32-byte aligned");
  }
  V8Region r;
  r.start = static_cast<std::uint32_t>(range.base);
  r.limit = static_cast<std::uint32_t>(range.last());
  r.perms = perms;
  return {r};
}

}  // namespace mpulab::layout
