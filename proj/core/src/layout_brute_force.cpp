//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

#include "layout_common.hpp"
#include "mpulab/error.hpp"
#include "mpulab/layout.hpp"

namespace mpulab::layout {
namespace {

constexpr std::size_t kMaxRequests = 5;
constexpr std::uint64_t kUnit = 1024;
constexpr std::uint64_t kMaxSize = 8 * kUnit;
// With every request at most 8 KiB, a 64 KiB block gives each one its own
// sub-region; larger blocks only coarsen sub-regions, so never lower waste.
constexpr unsigned kLowestExponent = 9;   // 1 KiB
constexpr unsigned kHighestExponent = 15;  // 64 KiB

struct BlockChoice {
  unsigned exponent = 0;
  std::vector<unsigned> starts;  // per member, in sub-regions
  std::vector<unsigned> counts;
  std::uint64_t waste = 0;
};

// Search over block sizes and sub-region start positions. Runs longer than
// the minimum only add waste, so each member's run length is fixed by the
// block size; waste is then fixed too and the first feasible start
// assignment for a size is as good as any other.
std::optional<BlockChoice> best_block(const std::vector<std::uint64_t>& sizes) {
  std::optional<BlockChoice> best;
  for (unsigned e = kLowestExponent; e <= kHighestExponent; ++e) {
    const std::uint64_t s = std::uint64_t{1} << (e + 1);
    const std::uint64_t sub = s / mpu::kSubregionCount;
    BlockChoice c;
    c.exponent = e;
    bool fits = true;
    for (auto size : sizes) {
      fits = fits && size <= s;
      c.counts.push_back(static_cast<unsigned>((size + sub - 1) / sub));
      c.waste += c.counts.back() * sub - size;
    }
    if (!fits) continue;
    c.starts.assign(sizes.size(), 0);
    std::function<bool(std::size_t, unsigned)> place = [&](std::size_t m, unsigned used) {
      if (m == sizes.size()) return true;
      for (unsigned start = 0; start + c.counts[m] <= mpu::kSubregionCount; ++start) {
        const unsigned bits = ((1U << c.counts[m]) - 1U) << start;
        if (used & bits) continue;
        c.starts[m] = start;
        if (place(m + 1, used | bits)) return true;
      }
      return false;
    };
    if (place(0, 0) && (!best || c.waste < best->waste)) best = c;
  }
  return best;
}

struct Candidate {
  unsigned regions = 0;
  std::uint64_t waste = 0;
  std::size_t blocks = 0;
  std::vector<std::vector<std::size_t>> members;
  std::vector<BlockChoice> choices;

  auto key() const { return std::tie(regions, waste, blocks); }
};

PackingPlan layout_v7(std::span<const AllocationRequest> requests, const Candidate& best,
                      const PackOptions& options) {
  // Largest blocks first keeps every block naturally aligned without gaps.
  std::vector<std::size_t> order(best.members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return best.choices[a].exponent > best.choices[b].exponent;
  });

  PackingPlan plan;
  std::uint64_t cursor = options.arena_base;
  for (auto b : order) {
    const auto& choice = best.choices[b];
    const std::uint64_t s = std::uint64_t{1} << (choice.exponent + 1);
    const std::uint64_t sub = s / mpu::kSubregionCount;
    const std::uint64_t base = detail::align_up(cursor, s);
    cursor = base + s;
    for (std::size_t m = 0; m < best.members[b].size(); ++m) {
      const auto& req = requests[best.members[b][m]];
      plan.placements[req.id] = {base + choice.starts[m] * sub, req.size};
      unsigned enabled = ((1U << choice.counts[m]) - 1U) << choice.starts[m];
      mpu::V7Region region;
      region.base = static_cast<std::uint32_t>(base);
      region.size_exponent = static_cast<std::uint8_t>(choice.exponent);
      region.srd_mask = static_cast<std::uint8_t>(~enabled);
      region.perms = req.perms;
      auto [it, inserted] = plan.per_context_regions.try_emplace(req.context, mpu::V7Regions{});
      std::get<mpu::V7Regions>(it->second).push_back(region);
    }
  }
  return plan;
}

}  // namespace

PackingPlan brute_force_pack(std::span<const AllocationRequest> requests, mpu::Arch arch,
                             unsigned region_budget, const PackOptions& options) {
  if (region_budget < 1 || region_budget > 16) {
    throw Error(Errc::InvalidArgument, "region budget outside 1..16");
  }
  if (requests.size() > kMaxRequests) {
    throw Error(Errc::InvalidArgument, "brute force handles at most five requests");
  }
  std::set<std::string> ids;
  for (const auto& r : requests) {
    if (!std::holds_alternative<Floating>(r.placement) || r.size == 0 || r.size % kUnit != 0 ||
        r.size > kMaxSize || !ids.insert(r.id).second) {
      throw Error(Errc::InvalidArgument,
                  "brute force needs unique floating requests of 1..8 KiB in 1 KiB steps");
    }
  }

  const std::size_t n = requests.size();
  PackingPlan plan;

  if (arch == mpu::Arch::V8) {
    // Sizes are multiples of 32, so a region of exactly the request size is
    // always expressible and cannot be beaten.
    std::map<std::string, unsigned> per_context;
    std::uint64_t cursor = options.arena_base;
    for (const auto& req : requests) {
      plan.placements[req.id] = {cursor, req.size};
      mpu::V8Region region;
      region.start = static_cast<std::uint32_t>(cursor);
      region.limit = static_cast<std::uint32_t>(cursor + req.size - 1);
      region.perms = req.perms;
      auto [it, inserted] = plan.per_context_regions.try_emplace(req.context, mpu::V8Regions{});
      std::get<mpu::V8Regions>(it->second).push_back(region);
      plan.regions_used = std::max(plan.regions_used, ++per_context[req.context]);
      cursor += req.size;
    }
  } else if (n > 0) {
    std::optional<Candidate> best;
    // Restricted growth strings enumerate every set partition exactly once.
    std::vector<std::size_t> label(n, 0);
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t used) {
      if (i == n) {
        Candidate c;
        c.members.assign(used, {});
        for (std::size_t r = 0; r < n; ++r) c.members[label[r]].push_back(r);
        std::map<std::string, unsigned> blocks_per_context;
        for (const auto& block : c.members) {
          std::set<std::string> contexts;
          std::vector<std::uint64_t> sizes;
          for (auto r : block) {
            // One region per context per block: a context cannot hold two runs.
            if (!contexts.insert(requests[r].context).second) return;
            sizes.push_back(requests[r].size);
          }
          auto choice = best_block(sizes);
          if (!choice) return;
          c.waste += choice->waste;
          c.choices.push_back(*choice);
          for (const auto& ctx : contexts) {
            c.regions = std::max(c.regions, ++blocks_per_context[ctx]);
          }
        }
        c.blocks = used;
        if (!best || c.key() < best->key()) best = std::move(c);
        return;
      }
      for (std::size_t l = 0; l <= used && l < n; ++l) {
        label[i] = l;
        walk(i + 1, std::max(used, l + 1));
      }
    };
    walk(0, 0);

    plan = layout_v7(requests, *best, options);
    plan.regions_used = best->regions;
  }

  if (plan.regions_used > region_budget) {
    throw Error(Errc::RegionBudgetExhausted, "optimal plan needs " +
                                                 std::to_string(plan.regions_used) +
                                                 " regions per context");
  }
  detail::number_regions(plan);
  std::uint64_t waste = 0;
  for (const auto& [context, list] : plan.per_context_regions) {
    std::visit(
        [&](const auto& regions) {
          for (const auto& r : regions) {
            std::uint64_t enabled = 0;
            if constexpr (std::is_same_v<std::decay_t<decltype(r)>, mpu::V7Region>) {
              for (unsigned s = 0; s < mpu::kSubregionCount; ++s) {
                if (r.subregion_enabled(s)) enabled += r.subregion_size();
              }
            } else {
              enabled = r.range().size;
            }
            waste += enabled;
          }
        },
        list);
  }
  for (const auto& req : requests) waste -= req.size;
  plan.waste_bytes = waste;
  plan.naive_waste_bytes = naive_waste(requests);
  return plan;
}

}  // namespace mpulab::layout
