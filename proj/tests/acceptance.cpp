//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "mpulab/audit.hpp"
#include "mpulab/error.hpp"
#include "mpulab/layout.hpp"
#include "mpulab/mpu.hpp"
#include "mpulab/overhead.hpp"
#include "test_support.hpp"

namespace {

using namespace mpulab;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

Outcome golden_audit() {
  const auto golden = read_file(MPULAB_GOLDEN_DIR "/freertos_findings.txt");
  const auto start = Clock::now();
  std::ostringstream out, err;
  const int status = cli::run({"audit", "--fixture", "freertos"}, out, err);
  const double elapsed = seconds_since(start);
  const auto& text = out.str();
  const bool parts = contains(text, "EscalationGateReachable Unprivileged") &&
                     contains(text, "OverPermissive Unprivileged 0x40000000..0x5fffffff granted=rw-") &&
                     contains(text, "OverPermissive Unprivileged 0x20000000") &&
                     contains(text, "UnmappedPrivilegedDefault Privileged");
  std::ostringstream d;
  d << "exit=" << status << " lines_match=" << (text == golden) << " runtime=" << elapsed << "s";
  return {!golden.empty() && text == golden && parts && status == cli::kExitFindings && elapsed < 5.0,
          d.str()};
}

Outcome packing_example() {
  const PermissionSet rw{Rights{Rights::kRead | Rights::kWrite}, Rights{Rights::kRead | Rights::kWrite}};
  const std::vector<layout::AllocationRequest> requests{
      {"a", 5 * 1024, rw, layout::Floating{}, "ta"},
      {"b", 3 * 1024, rw, layout::Floating{}, "tb"},
  };
  const auto plan = layout::pack_regions(requests, mpu::Arch::V7, 1);
  std::ostringstream d;
  d << "regions_used=" << plan.regions_used << " waste=" << plan.waste_bytes
    << " naive=" << plan.naive_waste_bytes;
  return {plan.regions_used == 1 && plan.waste_bytes == 0 && plan.naive_waste_bytes == 4096, d.str()};
}

Outcome overhead_calibration() {
  std::vector<overhead::Event> trace(500, overhead::Event{overhead::EventKind::KernelCall, {}, {}});
  const auto model = overhead::default_cost_model();
  const auto per_call = overhead::simulate(trace, overhead::Strategy::PerCallEscalation, model, {});
  const auto reconfig = overhead::simulate(trace, overhead::Strategy::SwitchTimeReconfig, model, {});
  std::ostringstream d;
  d << "per_call_switches=" << per_call.priv_switches << " total_ms=" << per_call.total_seconds * 1e3
    << " reconfig_switches=" << reconfig.priv_switches;
  return {per_call.priv_switches == 1000 && per_call.total_seconds == 3.5e-3 && reconfig.priv_switches == 0,
          d.str()};
}

Outcome property(std::optional<std::string> (*check)(testing::Rng&), std::uint64_t seed) {
  const auto r = testing::run_property(check, seed, testing::kPropertyCases);
  std::ostringstream d;
  d << "cases=" << r.cases;
  if (r.failure) d << " failure: " << *r.failure;
  return {!r.failure && r.cases >= 1000, d.str()};
}

Outcome round_trip() {
  auto result = property(testing::check_round_trip, 5);
  mpu::V7Region kernel_data;
  kernel_data.number = 2;
  kernel_data.base = 0x20000000;
  kernel_data.size_exponent = 8;
  kernel_data.perms = {Rights::all(), Rights{Rights::kRead | Rights::kExecute}};
  const auto fixture = audit::freertos_fixture();
  const auto& regions = std::get<mpu::V7Regions>(fixture.config.regions);
  const auto bar = mpu::encode_v7(regions.at(2)).bar;
  result.detail += " region2_BAR=0x" + [&] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", bar);
    return std::string(buf);
  }();
  result.pass = result.pass && bar == 0x20000012U && mpu::encode_v7(kernel_data).bar == 0x20000012U;
  return result;
}

Outcome desk_optimality() {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::string first;
  testing::for_each_desk_instance(4, [&](const std::vector<layout::AllocationRequest>& requests) {
    ++instances;
    const auto greedy = layout::pack_regions(requests, mpu::Arch::V7, 16);
    const auto best = layout::brute_force_pack(requests, mpu::Arch::V7, 16);
    if (greedy.regions_used != best.regions_used || greedy.waste_bytes != best.waste_bytes) {
      if (mismatches++ == 0) {
        std::ostringstream s;
        s << " first mismatch:";
        for (const auto& r : requests) s << " " << r.size << "@" << r.context;
        s << " greedy=(" << greedy.regions_used << "," << greedy.waste_bytes << ") best=("
          << best.regions_used << "," << best.waste_bytes << ")";
        first = s.str();
      }
    }
  });
  std::ostringstream d;
  d << "instances=" << instances << " mismatches=" << mismatches << first;
  return {instances == 1 + 8 + 64 * 2 + 512 * 5 + 4096 * 15 && mismatches == 0, d.str()};
}

Outcome v8_advantage() {
  const AddressRange range{0x20000020, 5 * 1024};
  const PermissionSet rw{Rights{Rights::kRead | Rights::kWrite}, Rights{}};
  const auto v7_plain = layout::cover_range_v7(range, rw, false);
  const auto v7_srd = layout::cover_range_v7(range, rw, true);
  const auto v8 = layout::cover_range_v8(range, rw);

  auto valid = [](mpu::Arch arch, mpu::RegionList regions) {
    mpu::MpuConfig c;
    c.arch = arch;
    c.max_regions = 16;
    c.regions = std::move(regions);
    return mpu::validate_config(c).empty();
  };
  std::ostringstream d;
  d << "v7=" << v7_plain.size() << " v7_srd=" << v7_srd.size() << " v8=" << v8.size();
  return {v7_plain.size() >= 2 && v7_srd.size() >= 2 && v8.size() == 1 && valid(mpu::Arch::V7, v7_plain) &&
              valid(mpu::Arch::V7, v7_srd) && valid(mpu::Arch::V8, v8),
          d.str()};
}

Outcome property_suites() {
  const auto start = Clock::now();
  struct Suite {
    const char* name;
    std::optional<std::string> (*check)(testing::Rng&);
  };
  const Suite suites[] = {
      {"precedence", testing::check_precedence},
      {"fall_through", testing::check_fall_through},
      {"background_asymmetry", testing::check_background_asymmetry},
      {"strategy_dominance", testing::check_strategy_dominance},
      {"cluster_monotonicity", testing::check_cluster_monotonicity},
  };
  Outcome all{true, ""};
  std::uint64_t seed = 21;
  for (const auto& s : suites) {
    const auto r = property(s.check, seed++);
    all.pass = all.pass && r.pass;
    all.detail += std::string(s.name) + "(" + r.detail + ") ";
  }
  const double elapsed = seconds_since(start);
  all.detail += "runtime=" + std::to_string(elapsed) + "s";
  all.pass = all.pass && elapsed < 60.0;
  return all;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"freertos golden audit", golden_audit},
      {"packing 5KB+3KB", packing_example},
      {"overhead calibration", overhead_calibration},
      {"resolution oracle", [] { return property(testing::check_resolution_oracle, 4); }},
      {"encode/decode round trip", round_trip},
      {"desk-scale optimality", desk_optimality},
      {"v8 single region", v8_advantage},
      {"property suites", property_suites},
  };
  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, c.name, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
