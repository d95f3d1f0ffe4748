//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <bit>

#include "mpulab/audit.hpp"
#include "mpulab/error.hpp"

namespace mpulab::audit {
namespace {

constexpr Rights kNone{};
constexpr Rights kRx{Rights::kRead | Rights::kExecute};
constexpr Rights kRw{Rights::kRead | Rights::kWrite};
constexpr Rights kRwx{Rights::kAll};

constexpr std::uint64_t kFlashEnd = 0x20000000;
constexpr std::uint64_t kKernelCodeEnd = 24 * 1024;
constexpr std::uint32_t kSramBase = 0x20000000;
constexpr std::uint64_t kKernelDataSize = 512;
constexpr std::uint64_t kPeripheralBase = 0x40000000;
constexpr std::uint64_t kPeripheralEnd = 0x60000000;
constexpr std::uint32_t kRaisePrivilegeAddress = 0x00008000;

mpu::V7Region make_region(unsigned number, std::uint32_t base, std::uint64_t size,
                          std::uint8_t srd_mask, Rights priv, Rights user) {
  mpu::V7Region r;
  r.number = number;
  r.base = base;
  r.size_exponent = static_cast<std::uint8_t>(std::countr_zero(size) - 1);
  r.srd_mask = srd_mask;
  r.perms = {priv, user};
  return r;
}

}  // namespace

std::vector<AddressRange> default_audit_universe() {
  return {
      {0x00000000, kFlashEnd},                         // code
      {kSramBase, 0x2000},                             // kernel data, gap, default stack
      {kPeripheralBase, kPeripheralEnd - kPeripheralBase},
      {0xE000E000, 0x1000},                            // system control space
  };
}

AuditSubject freertos_fixture(const FixtureOptions& options) {
  if (!std::has_single_bit(options.stack_depth) || options.stack_depth < mpu::kMinRegionSize ||
      options.stack_depth > (std::uint64_t{1} << 31)) {
    throw Error(Errc::InvalidArgument, "stack depth must be a power of two of at least 32 bytes");
  }
  if (options.user_regions.size() > 3) {
    throw Error(Errc::InvalidArgument, "only regions 5..7 are left for tasks");
  }

  AuditSubject s;
  s.config.arch = mpu::Arch::V7;
  s.config.max_regions = 8;
  s.config.background_enabled = true;

  // The 24 KiB kernel code band and the 2 GiB peripheral window at 0x40000000
  // are not legal v7 regions on their own; both are realized with disabled
  // sub-regions of a larger aligned region.
  mpu::V7Regions regions{
      make_region(0, 0x00000000, std::uint64_t{1} << 31, 0x00, kRx, kRx),
      make_region(1, 0x00000000, 32 * 1024, 0xC0, kRx, kNone),
      make_region(2, kSramBase, kKernelDataSize, 0x00, kRwx, kRx),
      make_region(3, 0x00000000, std::uint64_t{1} << 32, 0xC3, kRw, kRw),
      make_region(4, options.stack_base, options.stack_depth, 0x00, kRwx, kRwx),
  };
  for (std::size_t i = 0; i < options.user_regions.size(); ++i) {
    auto r = options.user_regions[i];
    r.number = static_cast<unsigned>(5 + i);
    regions.push_back(r);
  }
  s.config.regions = std::move(regions);

  // What the kernel design intends, independent of how the table realizes it.
  const AddressRange kernel_code{0, kKernelCodeEnd};
  const AddressRange user_code{kKernelCodeEnd, kFlashEnd - kKernelCodeEnd};
  const AddressRange kernel_data{kSramBase, kKernelDataSize};
  const AddressRange stack{options.stack_base, options.stack_depth};
  const AddressRange peripherals{kPeripheralBase, kPeripheralEnd - kPeripheralBase};
  s.policy = {
      {kernel_code, Mode::Privileged, kRx},
      {kernel_code, Mode::Unprivileged, kNone},
      {user_code, Mode::Privileged, kRx},
      {user_code, Mode::Unprivileged, kRx},
      {kernel_data, Mode::Privileged, kRw},
      {kernel_data, Mode::Unprivileged, kNone},
      {stack, Mode::Privileged, kRwx},
      {stack, Mode::Unprivileged, kRwx},
      {peripherals, Mode::Privileged, kRw},
      {peripherals, Mode::Unprivileged, kNone},
  };

  s.gates = {{"xPortRaisePrivilege", kRaisePrivilegeAddress}};
  s.universe = default_audit_universe();
  return s;
}

}  // namespace mpulab::audit
