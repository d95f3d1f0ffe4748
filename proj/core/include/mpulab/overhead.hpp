//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpulab::overhead {

enum class EventKind : std::uint8_t { TaskSwitch, KernelCall, Interrupt };

struct Event {
  EventKind kind = EventKind::KernelCall;
  /// Incoming task; only meaningful for TaskSwitch.
  std::string task;
  std::optional<double> timestamp;

  friend bool operator==(const Event&, const Event&) = default;
};

enum class Strategy : std::uint8_t {
  /// Raise privilege on every kernel entry and drop it on exit.
  PerCallEscalation,
  /// Keep kernel code privileged and only rewrite regions when tasks switch.
  SwitchTimeReconfig,
};

std::string_view to_string(EventKind kind) noexcept;
std::string_view to_string(Strategy strategy) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text);
std::optional<Strategy> parse_strategy(std::string_view text);

struct CostModel {
  /// One privilege transition, measured at reference_clock_hz.
  double seconds_per_priv_switch = 3.5e-6;
  double reference_clock_hz = 25e6;
  double target_clock_hz = 25e6;
  /// One MPU region register reload at reference_clock_hz.
  double seconds_per_region_write = 0.0;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// 3.5 us per privilege transition on a 25 MHz Cortex-M3.
[[nodiscard]] CostModel default_cost_model();

struct Breakdown {
  EventKind kind = EventKind::KernelCall;
  std::uint64_t count = 0;
  std::uint64_t priv_switches = 0;
  std::uint64_t region_writes = 0;
  double seconds = 0.0;

  friend bool operator==(const Breakdown&, const Breakdown&) = default;
};

struct OverheadReport {
  Strategy strategy = Strategy::PerCallEscalation;
  std::uint64_t priv_switches = 0;
  std::uint64_t region_writes = 0;
  double total_seconds = 0.0;
  /// One entry per event kind present in the trace, in EventKind order.
  std::vector<Breakdown> per_event;

  friend bool operator==(const OverheadReport&, const OverheadReport&) = default;
};

/// Replays `trace`. Kernel calls and interrupts cost two privilege transitions
/// under PerCallEscalation and none under SwitchTimeReconfig; every task switch
/// reloads `regions_per_task[task]` regions under both. Costs scale by
/// reference_clock_hz / target_clock_hz.
/// Throws Error(UnknownTask) for a switch to a task missing from
/// `regions_per_task`, Error(InvalidArgument) for a non-positive switch cost or
/// clock, or a negative region write cost.
[[nodiscard]] OverheadReport simulate(std::span<const Event> trace, Strategy strategy,
                                      const CostModel& model,
                                      const std::map<std::string, unsigned>& regions_per_task);

/// Line format: `switch <task> [@<seconds>]`, `kcall [@<seconds>]`,
/// `irq [@<seconds>]`. Blank lines and `#` comments are skipped.
/// Throws Error(ParseError) naming the offending line.
[[nodiscard]] std::vector<Event> parse_trace(std::istream& in);

}  // namespace mpulab::overhead
