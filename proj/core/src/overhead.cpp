//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <array>
#include <charconv>
#include <istream>
#include <sstream>

#include "mpulab/error.hpp"
#include "mpulab/overhead.hpp"

namespace mpulab::overhead {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::TaskSwitch: return "TaskSwitch";
    case EventKind::KernelCall: return "KernelCall";
    case EventKind::Interrupt: return "Interrupt";
  }
  return "KernelCall";
}

std::string_view to_string(Strategy strategy) noexcept {
  return strategy == Strategy::PerCallEscalation ? "PerCallEscalation" : "SwitchTimeReconfig";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "TaskSwitch" || text == "switch") return EventKind::TaskSwitch;
  if (text == "KernelCall" || text == "kcall") return EventKind::KernelCall;
  if (text == "Interrupt" || text == "irq") return EventKind::Interrupt;
  return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "PerCallEscalation" || text == "per-call") return Strategy::PerCallEscalation;
  if (text == "SwitchTimeReconfig" || text == "switch-time") return Strategy::SwitchTimeReconfig;
  return std::nullopt;
}

CostModel default_cost_model() { return CostModel{}; }

OverheadReport simulate(std::span<const Event> trace, Strategy strategy, const CostModel& model,
                        const std::map<std::string, unsigned>& regions_per_task) {
  if (!(model.seconds_per_priv_switch > 0) || !(model.reference_clock_hz > 0) ||
      !(model.target_clock_hz > 0) || !(model.seconds_per_region_write >= 0)) {
    throw Error(Errc::InvalidArgument,
                "switch cost and clocks must be positive, region write cost non-negative");
  }
  const double scale = model.reference_clock_hz / model.target_clock_hz;

  std::array<Breakdown, 3> per{};
  for (std::size_t i = 0; i < per.size(); ++i) per[i].kind = static_cast<EventKind>(i);

  for (const auto& e : trace) {
    auto& b = per[static_cast<std::size_t>(e.kind)];
    ++b.count;
    if (e.kind == EventKind::TaskSwitch) {
      auto it = regions_per_task.find(e.task);
      if (it == regions_per_task.end()) {
        throw Error(Errc::UnknownTask, "no region count for task '" + e.task + "'");
      }
      b.region_writes += it->second;
    } else if (strategy == Strategy::PerCallEscalation) {
      b.priv_switches += 2;  // raise on entry, drop on exit
    }
  }

  OverheadReport report;
  report.strategy = strategy;
  for (auto& b : per) {
    if (b.count == 0) continue;
    b.seconds = (static_cast<double>(b.priv_switches) * model.seconds_per_priv_switch +
                 static_cast<double>(b.region_writes) * model.seconds_per_region_write) *
                scale;
    report.priv_switches += b.priv_switches;
    report.region_writes += b.region_writes;
    report.per_event.push_back(b);
  }
  // Computed from the totals rather than summed per kind so that it is one
  // multiplication away from the count.
  report.total_seconds = (static_cast<double>(report.priv_switches) * model.seconds_per_priv_switch +
                          static_cast<double>(report.region_writes) * model.seconds_per_region_write) *
                         scale;
  return report;
}

std::vector<Event> parse_trace(std::istream& in) {
  std::vector<Event> trace;
  std::string line;
  std::size_t number = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::ParseError, "trace line " + std::to_string(number) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.empty()) continue;

    Event e;
    if (tokens.back().front() == '@') {
      const auto& t = tokens.back();
      double value = 0;
      auto [ptr, ec] = std::from_chars(t.data() + 1, t.data() + t.size(), value);
      if (ec != std::errc{} || ptr != t.data() + t.size() || t.size() == 1) {
        fail("bad timestamp '" + t + "'");
      }
      e.timestamp = value;
      tokens.pop_back();
    }
    if (tokens.empty()) fail("missing event");
    if (tokens[0] == "switch") {
      if (tokens.size() != 2) fail("expected 'switch <task>'");
      e.kind = EventKind::TaskSwitch;
      e.task = tokens[1];
    } else if (tokens[0] == "kcall" || tokens[0] == "irq") {
      if (tokens.size() != 1) fail("unexpected text after '" + tokens[0] + "'");
      e.kind = tokens[0] == "kcall" ? EventKind::KernelCall : EventKind::Interrupt;
    } else {
      fail("unknown event '" + tokens[0] + "'");
    }
    trace.push_back(std::move(e));
  }
  return trace;
}

}  // namespace mpulab::overhead
