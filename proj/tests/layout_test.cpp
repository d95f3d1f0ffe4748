//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <set>

#include "mpulab/error.hpp"
#include "mpulab/layout.hpp"
#include "test_support.hpp"

namespace mpulab::layout {
namespace {

using testing::Rng;
using testing::chance;
using testing::uniform;

const Rights kNone{};
const Rights kRw{Rights::kRead | Rights::kWrite};
const Rights kRx{Rights::kRead | Rights::kExecute};
const PermissionSet kData{kRw, kRw};

AllocationRequest req(std::string id, std::uint64_t size, std::string context,
                      PermissionSet perms = kData) {
  return {std::move(id), size, perms, Floating{}, std::move(context)};
}

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::InvalidArgument;
}

const mpu::V7Region& only_region(const PackingPlan& plan, const std::string& ctx) {
  const auto& list = std::get<mpu::V7Regions>(plan.per_context_regions.at(ctx));
  EXPECT_EQ(list.size(), 1U);
  return list.front();
}

// Every byte of a request is reachable with exactly its rights in its own
// context and faults in every other context.
void expect_sound(const PackingPlan& plan, std::span<const AllocationRequest> requests,
                  mpu::Arch arch) {
  for (const auto& r : requests) {
    const auto placed = plan.placements.at(r.id);
    ASSERT_EQ(placed.size, r.size);
    if (const auto* f = std::get_if<Fixed>(&r.placement)) EXPECT_EQ(placed.base, f->base);
    for (const auto& [ctx, list] : plan.per_context_regions) {
      const mpu::Resolver resolver(context_config(plan, ctx, arch));
      for (std::uint64_t a = placed.base; a < placed.end(); a += std::max<std::uint64_t>(1, r.size / 37)) {
        for (auto address : {a, placed.last()}) {
          const auto e = resolver.effective(static_cast<std::uint32_t>(address));
          if (ctx == r.context) {
            ASSERT_EQ(e, r.perms) << r.id << " at " << hex32(address);
          } else {
            ASSERT_EQ(e, (PermissionSet{})) << r.id << " visible to " << ctx;
          }
        }
      }
    }
  }
  for (const auto& [ctx, list] : plan.per_context_regions) {
    EXPECT_TRUE(mpu::validate_config(context_config(plan, ctx, arch)).empty()) << ctx;
  }
}

// --- pack_regions ---

TEST(Pack, FiveAndThreeKilobytesShareOneBlock) {
  const std::vector requests{req("A", 5 * 1024, "A"), req("B", 3 * 1024, "B")};
  for (auto pack : {pack_regions, brute_force_pack}) {
    const auto plan = pack(requests, mpu::Arch::V7, 1, {});
    EXPECT_EQ(plan.regions_used, 1U);
    EXPECT_EQ(plan.waste_bytes, 0U);
    EXPECT_EQ(plan.naive_waste_bytes, 4096U);
    const auto& a = only_region(plan, "A");
    const auto& b = only_region(plan, "B");
    EXPECT_EQ(a.size(), 8U * 1024);
    EXPECT_EQ(a.base, b.base);
    EXPECT_EQ(a.size_exponent, b.size_exponent);
    EXPECT_EQ(a.srd_mask, 0xE0);
    EXPECT_EQ(b.srd_mask, 0x1F);
    EXPECT_EQ(plan.placements.at("A").base, a.base);
    EXPECT_EQ(plan.placements.at("B").base, a.base + 5 * 1024);
    expect_sound(plan, requests, mpu::Arch::V7);
  }
}

TEST(Pack, PowerOfTwoRequestIsExact) {
  const std::vector requests{req("buf", 4096, "t")};
  const auto plan = pack_regions(requests, mpu::Arch::V7, 1);
  const auto& r = only_region(plan, "t");
  EXPECT_EQ(r.size(), 4096U);
  EXPECT_EQ(r.srd_mask, 0);
  EXPECT_EQ(r.base, 0x20000000U);
  EXPECT_EQ(plan.waste_bytes, 0U);
  EXPECT_EQ(plan.naive_waste_bytes, 0U);
}

TEST(Pack, EmptyRequestList) {
  const auto plan = pack_regions({}, mpu::Arch::V7, 1);
  EXPECT_EQ(plan.regions_used, 0U);
  EXPECT_TRUE(plan.placements.empty());
  EXPECT_EQ(brute_force_pack({}, mpu::Arch::V7, 1).regions_used, 0U);
}

TEST(Pack, BudgetExhaustion) {
  const std::vector requests{req("q1", 256, "t"), req("q2", 256, "t"), req("q3", 256, "t")};
  EXPECT_EQ(error_of([&] { (void)pack_regions(requests, mpu::Arch::V7, 2); }),
            Errc::RegionBudgetExhausted);
  EXPECT_EQ(error_of([&] { (void)brute_force_pack(requests, mpu::Arch::V7, 2); }),
            Errc::InvalidArgument);  // sizes below 1 KiB are outside the oracle's domain
  EXPECT_EQ(pack_regions(requests, mpu::Arch::V7, 3).regions_used, 3U);
}

TEST(Pack, InvalidArguments) {
  EXPECT_EQ(error_of([] { (void)pack_regions({}, mpu::Arch::V7, 0); }), Errc::InvalidArgument);
  const std::vector zero{req("z", 0, "t")};
  EXPECT_EQ(error_of([&] { (void)pack_regions(zero, mpu::Arch::V7, 1); }), Errc::InvalidArgument);
  const std::vector dup{req("d", 32, "t"), req("d", 32, "u")};
  EXPECT_EQ(error_of([&] { (void)pack_regions(dup, mpu::Arch::V7, 1); }), Errc::InvalidArgument);
}

TEST(Pack, FixedPlacements) {
  auto a = req("dma", 3 * 1024, "t");
  a.placement = Fixed{0x20010000};
  auto b = req("log", 1024, "u");
  b.placement = Fixed{0x20010C00};
  const std::vector requests{a, b, req("heap", 2048, "t")};
  const auto plan = pack_regions(requests, mpu::Arch::V7, 2);
  expect_sound(plan, requests, mpu::Arch::V7);
  EXPECT_EQ(plan.placements.at("dma").base, 0x20010000U);
  EXPECT_LE(plan.waste_bytes, plan.naive_waste_bytes);

  auto clash = req("clash", 1024, "v");
  clash.placement = Fixed{0x20010400};
  const std::vector bad{a, clash};
  EXPECT_EQ(error_of([&] { (void)pack_regions(bad, mpu::Arch::V7, 2); }),
            Errc::UnsatisfiableFixedPlacement);

  auto wrap = req("wrap", 64, "v");
  wrap.placement = Fixed{0xFFFFFFE0};
  const std::vector past{wrap};
  EXPECT_EQ(error_of([&] { (void)pack_regions(past, mpu::Arch::V7, 1); }),
            Errc::UnsatisfiableFixedPlacement);
}

TEST(Pack, V8RoundsToGranules) {
  const std::vector requests{req("a", 5000, "t"), req("b", 64, "u"), req("c", 100, "t")};
  const auto plan = pack_regions(requests, mpu::Arch::V8, 2);
  EXPECT_EQ(plan.waste_bytes, (5024U - 5000U) + 0U + (128U - 100U));
  EXPECT_EQ(plan.regions_used, 2U);
  expect_sound(plan, requests, mpu::Arch::V8);
}

TEST(Pack, RandomPlansAreSoundAndNeverWorseThanNaive) {
  Rng rng(21);
  for (std::size_t i = 0; i < testing::kPropertyCases; ++i) {
    std::vector<AllocationRequest> requests(uniform(rng, 1, 6));
    for (std::size_t r = 0; r < requests.size(); ++r) {
      requests[r] = req("r" + std::to_string(r), uniform(rng, 1, 20000),
                        "t" + std::to_string(uniform(rng, 0, 2)), testing::random_perms(rng));
      if (requests[r].perms == PermissionSet{}) requests[r].perms = kData;
    }
    for (auto arch : {mpu::Arch::V7, mpu::Arch::V8}) {
      const auto plan = pack_regions(requests, arch, 8);
      ASSERT_LE(plan.waste_bytes, plan.naive_waste_bytes);
      expect_sound(plan, requests, arch);
      if (::testing::Test::HasFatalFailure()) return;
    }
  }
}

// --- brute_force_pack ---

TEST(BruteForce, ThreeKilobytesNeedsNoWaste) {
  const std::vector requests{req("x", 3 * 1024, "t")};
  const auto plan = brute_force_pack(requests, mpu::Arch::V7, 1);
  EXPECT_EQ(plan.regions_used, 1U);
  EXPECT_EQ(plan.waste_bytes, 0U);
  EXPECT_EQ(only_region(plan, "t").srd_mask, 0xC0);
}

TEST(BruteForce, Preconditions) {
  const std::vector odd{req("x", 1500, "t")};
  EXPECT_EQ(error_of([&] { (void)brute_force_pack(odd, mpu::Arch::V7, 1); }), Errc::InvalidArgument);
  std::vector<AllocationRequest> many;
  for (int i = 0; i < 6; ++i) many.push_back(req("r" + std::to_string(i), 1024, "t" + std::to_string(i)));
  EXPECT_EQ(error_of([&] { (void)brute_force_pack(many, mpu::Arch::V7, 1); }), Errc::InvalidArgument);
}

TEST(BruteForce, GreedyMatchesOptimumOnDeskInstances) {
  std::size_t instances = 0;
  testing::for_each_desk_instance(3, [&](const std::vector<AllocationRequest>& requests) {
    ++instances;
    const auto greedy = pack_regions(requests, mpu::Arch::V7, 4);
    const auto best = brute_force_pack(requests, mpu::Arch::V7, 4);
    ASSERT_EQ(greedy.regions_used, best.regions_used);
    ASSERT_EQ(greedy.waste_bytes, best.waste_bytes);
  });
  EXPECT_EQ(instances, 1U + 8U + 64U * 2U + 512U * 5U);
}

// --- cover_range ---

TEST(CoverRange, FiveKilobytesUnaligned) {
  const AddressRange range{0x20000020, 5 * 1024};
  const auto plain = cover_range_v7(range, kData, false);
  const auto srd = cover_range_v7(range, kData, true);
  const auto v8 = cover_range_v8(range, kData);
  EXPECT_GE(plain.size(), 2U);
  EXPECT_LE(srd.size(), plain.size());
  EXPECT_EQ(v8.size(), 1U);
  for (const auto* list : {&plain, &srd}) {
    mpu::MpuConfig c;
    c.max_regions = 16;
    c.regions = *list;
    c.background_enabled = false;
    EXPECT_TRUE(mpu::validate_config(c).empty());
    const mpu::Resolver resolver(c);
    for (std::uint64_t a = range.base - 32; a < range.end() + 32; a += 32) {
      EXPECT_EQ(resolver.effective(static_cast<std::uint32_t>(a)),
                range.contains(a) ? kData : PermissionSet{})
          << hex32(a);
    }
  }
}

TEST(CoverRange, AlignedPowerOfTwoIsOneRegion) {
  EXPECT_EQ(cover_range_v7({0x8000, 0x8000}, kData, false).size(), 1U);
  EXPECT_THROW((void)cover_range_v7({0x8010, 0x20}, kData, false), Error);
}

// --- cover_peripherals ---

std::vector<PeripheralSpec> adjacent(std::uint64_t base, std::uint64_t size, unsigned count,
                                     std::set<unsigned> protect) {
  std::vector<PeripheralSpec> out;
  for (unsigned i = 0; i < count; ++i) {
    out.push_back({"p" + std::to_string(i), {base + i * size, size}, protect.contains(i)});
  }
  return out;
}

TEST(Cover, EightFourKilobytePeripherals) {
  const auto ps = adjacent(0x40020000, 4096, 8, {2, 5});
  const auto plan = cover_peripherals(ps, mpu::Arch::V7);
  const auto& priv = std::get<mpu::V7Regions>(plan.privileged_view);
  const auto& user = std::get<mpu::V7Regions>(plan.unprivileged_view);
  ASSERT_EQ(priv.size(), 1U);
  ASSERT_EQ(user.size(), 1U);
  EXPECT_EQ(priv[0].base, 0x40020000U);
  EXPECT_EQ(priv[0].size(), 32U * 1024);
  EXPECT_EQ(priv[0].srd_mask, 0);
  EXPECT_EQ(user[0].srd_mask, (1U << 2) | (1U << 5));
  EXPECT_TRUE(plan.uncovered.empty());
}

TEST(Cover, FarPeripheralsWithOneRegionLeft) {
  const std::vector<PeripheralSpec> ps{{"uart", {0x40004000, 0x400}, false},
                                       {"gpio", {0x48000000, 0x400}, false}};
  const auto plan = cover_peripherals(ps, mpu::Arch::V7, 1);
  EXPECT_EQ(mpu::region_count(plan.privileged_view), 1U);
  EXPECT_EQ(plan.uncovered, std::vector<std::string>{"gpio"});
}

TEST(Cover, SingleUnprotectedPeripheral) {
  const std::vector<PeripheralSpec> ps{{"timer", {0x40000000, 0x400}, false}};
  const auto plan = cover_peripherals(ps, mpu::Arch::V7);
  const auto& priv = std::get<mpu::V7Regions>(plan.privileged_view);
  ASSERT_EQ(priv.size(), 1U);
  EXPECT_EQ(priv[0].srd_mask, 0);
  EXPECT_EQ(priv[0].size(), 0x400U);
  EXPECT_TRUE(std::get<mpu::V7Regions>(plan.unprivileged_view)[0].enabled);
}

TEST(Cover, InexpressibleSizesAreReported) {
  const std::vector<PeripheralSpec> ps{{"odd", {0x40000000, 0x300}, false},
                                       {"tiny", {0x40001000, 16}, false}};
  const auto plan = cover_peripherals(ps, mpu::Arch::V7);
  EXPECT_EQ(plan.uncovered, (std::vector<std::string>{"odd", "tiny"}));
}

TEST(Cover, OverlapIsRejected) {
  const std::vector<PeripheralSpec> ps{{"a", {0x40000000, 0x400}, false},
                                       {"b", {0x40000200, 0x400}, false}};
  EXPECT_THROW((void)cover_peripherals(ps, mpu::Arch::V7), Error);
}

TEST(Cover, V8RunsNeedNoEqualSizes) {
  const std::vector<PeripheralSpec> ps{{"a", {0x40000000, 0x400}, false},
                                       {"b", {0x40000400, 0x100}, true},
                                       {"c", {0x40000500, 0x60}, false}};
  const auto plan = cover_peripherals(ps, mpu::Arch::V8);
  EXPECT_EQ(mpu::region_count(plan.privileged_view), 1U);
  EXPECT_EQ(mpu::region_count(plan.unprivileged_view), 2U);
}

// Unprivileged code reaches exactly the unprotected peripherals.
TEST(Cover, RandomPlansProtectExactly) {
  Rng rng(22);
  for (std::size_t i = 0; i < testing::kPropertyCases; ++i) {
    std::vector<PeripheralSpec> ps;
    std::uint64_t cursor = 0x40000000;
    const auto groups = uniform(rng, 1, 3);
    for (std::uint64_t g = 0; g < groups; ++g) {
      const std::uint64_t size = std::uint64_t{32} << uniform(rng, 0, 7);
      cursor = (cursor + 8 * size - 1) / size * size + uniform(rng, 0, 3) * size;
      const auto count = uniform(rng, 1, 10);
      for (std::uint64_t k = 0; k < count; ++k) {
        ps.push_back({"p" + std::to_string(ps.size()), {cursor, size}, chance(rng, 0.4)});
        cursor += size;
      }
    }
    for (auto arch : {mpu::Arch::V7, mpu::Arch::V8}) {
      const auto plan = cover_peripherals(ps, arch, 8);
      auto config = [&](const mpu::RegionList& list) {
        mpu::MpuConfig c;
        c.arch = arch;
        c.max_regions = arch == mpu::Arch::V7 ? 8 : 16;
        c.regions = list;
        c.background_enabled = false;
        EXPECT_TRUE(mpu::validate_config(c).empty());
        return c;
      };
      const mpu::Resolver priv(config(plan.privileged_view));
      const mpu::Resolver user(config(plan.unprivileged_view));
      const std::set<std::string> uncovered(plan.uncovered.begin(), plan.uncovered.end());
      for (const auto& p : ps) {
        if (uncovered.contains(p.id)) continue;
        for (auto a : {p.range.base, p.range.base + p.range.size / 2, p.range.last()}) {
          const auto address = static_cast<std::uint32_t>(a);
          ASSERT_TRUE(priv.resolve({address, Mode::Privileged, AccessKind::Write}).allowed()) << p.id;
          ASSERT_EQ(user.resolve({address, Mode::Unprivileged, AccessKind::Read}).allowed(),
                    !p.is_protected)
              << p.id << " arch " << mpu::to_string(arch);
        }
      }
    }
  }
}

// --- cluster_sections ---

SectionDescriptor section(std::string id, std::uint64_t base, std::uint64_t size, PermissionSet perms) {
  return {std::move(id), {base, size}, perms};
}

TEST(Cluster, IdenticalAdjacentSectionsMerge) {
  const std::vector ss{section("a", 0x1000, 0x100, {kRx, kRx}), section("b", 0x1100, 0x200, {kRx, kRx}),
                       section("c", 0x1300, 0x40, {kRx, kRx})};
  for (unsigned k : {1U, 2U, 5U}) {
    const auto cs = cluster_sections(ss, k);
    ASSERT_EQ(cs.size(), 1U) << k;
    EXPECT_EQ(cs[0].range, (AddressRange{0x1000, 0x340}));
    EXPECT_EQ(over_grant_score(ss, cs), 0U);
  }
}

// Exhaustive search over all 2-partitions of {rx, rx, rw}.
TEST(Cluster, TwoRegionsSeparateCodeFromData) {
  const std::vector ss{section("text", 0x0, 0x400, {kRx, kRx}), section("rodata", 0x400, 0x400, {kRx, kRx}),
                       section("data", 0x800, 0x400, {kRw, kRw})};
  std::uint64_t best = ~std::uint64_t{0};
  std::vector<Cluster> best_partition;
  for (unsigned mask = 1; mask < 7; ++mask) {
    std::vector<Cluster> parts(2);
    for (unsigned i = 0; i < 3; ++i) {
      auto& c = parts[(mask >> i) & 1U];
      if (c.members.empty()) {
        c.range = ss[i].range;
        c.perms = ss[i].perms;
      } else {
        c.perms = c.perms | ss[i].perms;
      }
      c.members.push_back(ss[i].id);
    }
    const auto score = over_grant_score(ss, parts);
    if (score < best) {
      best = score;
      best_partition = parts;
    }
  }
  const auto cs = cluster_sections(ss, 2);
  ASSERT_EQ(cs.size(), 2U);
  EXPECT_EQ(over_grant_score(ss, cs), best);
  EXPECT_EQ(cs[0].members, (std::vector<std::string>{"text", "rodata"}));
  EXPECT_EQ(cs[1].members, (std::vector<std::string>{"data"}));
  EXPECT_EQ(cs[0].perms, (PermissionSet{kRx, kRx}));
}

TEST(Cluster, EnoughRegionsGivesSingletons) {
  const std::vector ss{section("a", 0x0, 0x100, {kRx, kNone}), section("b", 0x100, 0x100, {kRw, kRw}),
                       section("c", 0x200, 0x100, {kRx, kRx})};
  const auto cs = cluster_sections(ss, 3);
  EXPECT_EQ(cs.size(), 3U);
  EXPECT_EQ(over_grant_score(ss, cs), 0U);
}

TEST(Cluster, DeterministicAndValidated) {
  Rng rng(23);
  const auto ss = testing::random_sections(rng, 8);
  EXPECT_EQ(cluster_sections(ss, 3), cluster_sections(ss, 3));
  EXPECT_TRUE(cluster_sections({}, 2).empty());
  EXPECT_THROW((void)cluster_sections(ss, 0), Error);
  const std::vector overlap{section("a", 0, 0x100, {kRx, kRx}), section("b", 0x80, 0x100, {kRx, kRx})};
  EXPECT_THROW((void)cluster_sections(overlap, 2), Error);
}

}  // namespace
}  // namespace mpulab::layout
