//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "document.hpp"
#include "mpulab/error.hpp"

namespace mpulab::cli {
namespace {

struct Common {
  std::string document;
  std::string fixture;
  bool json = false;
};

struct Output {
  std::ostream& out;
  bool as_json;
  std::string command;

  void emit(json body) const {
    json report = {{"schema_version", kSchemaVersion}, {"command", command}};
    report.update(body);
    out << report.dump(2) << "\n";
  }
};

ProjectDocument load(const Common& c) {
  if (!c.fixture.empty()) {
    if (c.fixture != "freertos") throw Error(Errc::InvalidArgument, "unknown fixture '" + c.fixture + "'");
    if (!c.document.empty()) throw Error(Errc::InvalidArgument, "give a document or --fixture, not both");
    return freertos_document();
  }
  if (c.document.empty()) throw Error(Errc::InvalidArgument, "no document given (or use --fixture freertos)");
  return load_document(c.document);
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string perms_str(const PermissionSet& p) {
  return "priv=" + p.privileged.str() + " user=" + p.unprivileged.str();
}

void print_v7(std::ostream& out, const mpu::V7Regions& regions) {
  out << "num  base        size        srd   perms                 enabled\n";
  for (const auto& r : regions) {
    out << std::left << std::setw(5) << r.number << std::setw(12) << hex32(r.base)
        << std::setw(12) << r.size() << "0x" << std::hex << std::setw(2) << std::setfill('0')
        << std::right << unsigned{r.srd_mask} << std::dec << std::setfill(' ') << std::left
        << "  " << std::setw(22) << perms_str(r.perms) << (r.enabled ? "yes" : "no") << "\n";
  }
}

void print_v8(std::ostream& out, const mpu::V8Regions& regions) {
  out << "num  start       limit       perms                 enabled\n";
  for (const auto& r : regions) {
    out << std::left << std::setw(5) << r.number << std::setw(12) << hex32(r.start)
        << std::setw(12) << hex32(r.limit) << std::setw(22) << perms_str(r.perms)
        << (r.enabled ? "yes" : "no") << "\n";
  }
}

void print_regions(std::ostream& out, const mpu::RegionList& list) {
  std::visit(
      [&](const auto& regions) {
        if constexpr (std::is_same_v<std::decay_t<decltype(regions)>, mpu::V7Regions>) {
          print_v7(out, regions);
        } else {
          print_v8(out, regions);
        }
      },
      list);
}

json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

// ---------------------------------------------------------------------------

int cmd_validate(const ProjectDocument& doc, const Output& o) {
  const auto violations = mpu::validate_config(doc.config);
  if (o.as_json) {
    o.emit({{"violations", violations}});
  } else {
    o.out << "region  code                    detail\n";
    for (const auto& v : violations) {
      o.out << std::left << std::setw(8) << (v.region ? std::to_string(*v.region) : "-")
            << std::setw(24) << to_string(v.code) << v.detail << "\n";
    }
  }
  return violations.empty() ? kExitClean : kExitFindings;
}

int cmd_resolve(const ProjectDocument& doc, const Output& o, const std::string& addr,
                const std::string& mode, const std::string& kind) {
  mpu::AccessQuery q;
  q.address = parse_address(json(addr), "--addr");
  const auto m = parse_mode(mode);
  const auto k = parse_access_kind(kind);
  if (!m) throw Error(Errc::InvalidArgument, "unknown mode '" + mode + "'");
  if (!k) throw Error(Errc::InvalidArgument, "unknown access kind '" + kind + "'");
  q.mode = *m;
  q.kind = *k;
  const auto d = mpu::resolve_access(doc.config, q);
  if (o.as_json) {
    o.emit({{"query", q}, {"decision", d}});
  } else {
    o.out << hex32(q.address) << " " << to_string(q.mode) << " " << to_string(q.kind) << " -> "
          << to_string(d.verdict);
    if (d.fault_reason) o.out << " " << to_string(*d.fault_reason);
    o.out << " region=" << (d.matched_region ? std::to_string(*d.matched_region) : "background")
          << "\n";
  }
  return d.allowed() ? kExitClean : kExitFindings;
}

int cmd_encode(const ProjectDocument& doc, const Output& o, std::optional<unsigned> only) {
  const auto* regions = std::get_if<mpu::V7Regions>(&doc.config.regions);
  if (!regions) throw Error(Errc::InvalidArgument, "register encoding exists for v7 regions only");
  json rows = json::array();
  bool failed = false;
  bool found = !only;
  for (const auto& r : *regions) {
    if (only && r.number != *only) continue;
    found = true;
    json row = {{"number", r.number}};
    try {
      const auto e = mpu::encode_v7(r);
      row["encoding"] = e;
      if (!o.as_json) o.out << "region " << r.number << ": BAR=" << hex32(e.bar) << " BASR=" << hex32(e.basr) << "\n";
    } catch (const Error& e) {
      failed = true;
      row["error"] = error_json(e);
      if (!o.as_json) o.out << "region " << r.number << ": " << e.what() << "\n";
    }
    rows.push_back(row);
  }
  if (!found) throw Error(Errc::InvalidArgument, "no region numbered " + std::to_string(*only));
  if (o.as_json) o.emit({{"encodings", rows}});
  return failed ? kExitFindings : kExitClean;
}

int cmd_pack(const ProjectDocument& doc, const Output& o, unsigned budget, bool exhaustive) {
  layout::PackingPlan plan;
  try {
    plan = exhaustive ? layout::brute_force_pack(doc.requests, doc.config.arch, budget)
                      : layout::pack_regions(doc.requests, doc.config.arch, budget);
  } catch (const Error& e) {
    if (e.code() != Errc::RegionBudgetExhausted && e.code() != Errc::UnsatisfiableFixedPlacement) throw;
    if (o.as_json) {
      o.emit({{"error", error_json(e)}});
    } else {
      o.out << e.what() << "\n";
    }
    return kExitFindings;
  }
  if (o.as_json) {
    o.emit({{"plan", plan}});
    return kExitClean;
  }
  o.out << "request           base        size\n";
  for (const auto& [id, range] : plan.placements) {
    o.out << std::left << std::setw(18) << id << std::setw(12) << hex32(range.base) << range.size << "\n";
  }
  for (const auto& [ctx, list] : plan.per_context_regions) {
    o.out << "\ncontext " << ctx << "\n";
    print_regions(o.out, list);
  }
  o.out << "\nregions_used=" << plan.regions_used << " waste_bytes=" << plan.waste_bytes
        << " naive_waste_bytes=" << plan.naive_waste_bytes << "\n";
  return kExitClean;
}

int cmd_cover(const ProjectDocument& doc, const Output& o, unsigned budget) {
  const auto plan = layout::cover_peripherals(doc.peripherals, doc.config.arch, budget);
  if (o.as_json) {
    o.emit({{"plan", plan}});
  } else {
    o.out << "privileged view\n";
    print_regions(o.out, plan.privileged_view);
    o.out << "\nunprivileged view\n";
    print_regions(o.out, plan.unprivileged_view);
    o.out << "\nuncovered:";
    for (const auto& id : plan.uncovered) o.out << " " << id;
    o.out << "\n";
  }
  return plan.uncovered.empty() ? kExitClean : kExitFindings;
}

int cmd_cluster(const ProjectDocument& doc, const Output& o, unsigned max_regions) {
  const auto clusters = layout::cluster_sections(doc.sections, max_regions);
  const auto score = layout::over_grant_score(doc.sections, clusters);
  if (o.as_json) {
    o.emit({{"clusters", clusters}, {"over_grant_score", score}});
  } else {
    o.out << "base        end         perms                 members\n";
    for (const auto& c : clusters) {
      o.out << std::left << std::setw(12) << hex32(c.range.base) << std::setw(12)
            << hex32(c.range.end()) << std::setw(22) << perms_str(c.perms);
      for (std::size_t i = 0; i < c.members.size(); ++i) o.out << (i ? "," : "") << c.members[i];
      o.out << "\n";
    }
    o.out << "over_grant_score=" << score << "\n";
  }
  return kExitClean;
}

int cmd_audit(const ProjectDocument& doc, const Output& o, std::uint64_t granularity) {
  const auto universe = doc.universe ? *doc.universe : audit::default_audit_universe();
  const auto findings = audit::run_audit(doc.config, doc.policy, doc.gates, universe, granularity);
  if (o.as_json) {
    o.emit({{"findings", findings}});
  } else {
    o.out << audit::format_findings(findings);
  }
  return findings.empty() ? kExitClean : kExitFindings;
}

int cmd_simulate(const ProjectDocument& doc, const Output& o, const std::string& strategy_name,
                 const std::string& trace_path, const std::vector<std::string>& overrides,
                 std::optional<double> target_clock) {
  const auto strategy = overhead::parse_strategy(strategy_name);
  if (!strategy) throw Error(Errc::InvalidArgument, "unknown strategy '" + strategy_name + "'");
  std::filesystem::path path = trace_path;
  if (path.empty()) {
    if (!doc.trace) throw Error(Errc::InvalidArgument, "no trace given (--trace or the document's 'trace')");
    path = *doc.trace;
  }
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot read trace '" + path.string() + "'");
  const auto trace = overhead::parse_trace(in);

  auto regions = doc.regions_per_task;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::InvalidArgument, "--regions expects task=count");
    regions[kv.substr(0, eq)] = static_cast<unsigned>(parse_number(json(kv.substr(eq + 1)), "--regions"));
  }
  auto model = doc.cost_model;
  if (target_clock) model.target_clock_hz = *target_clock;

  const auto report = overhead::simulate(trace, *strategy, model, regions);
  if (o.as_json) {
    o.emit({{"report", report}});
  } else {
    o.out << "event       count   priv_switches  region_writes  seconds\n";
    for (const auto& b : report.per_event) {
      o.out << std::left << std::setw(12) << to_string(b.kind) << std::setw(8) << b.count
            << std::setw(15) << b.priv_switches << std::setw(15) << b.region_writes << b.seconds
            << "\n";
    }
    o.out << "strategy=" << to_string(report.strategy) << " priv_switches=" << report.priv_switches
          << " region_writes=" << report.region_writes << " total_ms=" << std::fixed
          << std::setprecision(3) << report.total_seconds * 1e3 << std::defaultfloat << "\n";
  }
  return kExitClean;
}

void add_common(CLI::App* sub, Common& c, bool document = true) {
  if (document) sub->add_option("document", c.document, "Project document (JSON)");
  sub->add_option("--fixture", c.fixture, "Built-in document instead of a file")->check(CLI::IsMember({"freertos"}));
  sub->add_flag("--json", c.json, "Print the machine-readable report");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MPU configuration analysis"};
  app.name("mpulab");
  app.require_subcommand(1);

  Common common;
  std::function<int()> action;
  auto bind = [&](CLI::App* sub, std::function<int(const ProjectDocument&, const Output&)> fn) {
    sub->callback([&, sub, fn] {
      action = [&, sub, fn] { return fn(load(common), Output{out, common.json, sub->get_name()}); };
    });
  };

  auto* validate = app.add_subcommand("validate", "Check region invariants");
  add_common(validate, common);
  bind(validate, cmd_validate);

  std::string addr, mode, kind;
  auto* resolve = app.add_subcommand("resolve", "Decide one access");
  add_common(resolve, common);
  resolve->add_option("--addr", addr, "Address (hex or decimal)")->required();
  resolve->add_option("--mode", mode, "privileged or unprivileged")->required();
  resolve->add_option("--kind", kind, "read, write or execute")->required();
  bind(resolve, [&](const ProjectDocument& d, const Output& o) { return cmd_resolve(d, o, addr, mode, kind); });

  std::optional<unsigned> region;
  auto* encode = app.add_subcommand("encode", "Print v7 BAR/BASR words");
  add_common(encode, common);
  encode->add_option("--region", region, "Only this region number");
  bind(encode, [&](const ProjectDocument& d, const Output& o) { return cmd_encode(d, o, region); });

  std::optional<unsigned> budget;
  bool exhaustive = false;
  auto* pack = app.add_subcommand("pack", "Place allocation requests into regions");
  add_common(pack, common);
  pack->add_option("--budget", budget, "Regions per context (default: region_budget)");
  pack->add_flag("--exhaustive", exhaustive, "Exhaustive search for small inputs");
  bind(pack, [&](const ProjectDocument& d, const Output& o) {
    return cmd_pack(d, o, budget.value_or(d.region_budget), exhaustive);
  });

  std::optional<unsigned> cover_budget;
  auto* cover = app.add_subcommand("cover", "Cover peripherals with regions");
  add_common(cover, common);
  cover->add_option("--budget", cover_budget, "Region budget (default: max_regions)");
  bind(cover, [&](const ProjectDocument& d, const Output& o) {
    return cmd_cover(d, o, cover_budget.value_or(d.config.max_regions));
  });

  std::optional<unsigned> max_regions;
  auto* cluster = app.add_subcommand("cluster", "Group sections by permissions");
  add_common(cluster, common);
  cluster->add_option("--max-regions", max_regions, "Cluster limit (default: max_regions)");
  bind(cluster, [&](const ProjectDocument& d, const Output& o) {
    return cmd_cluster(d, o, max_regions.value_or(d.config.max_regions));
  });

  std::uint64_t granularity = mpu::kDefaultGranularity;
  auto* audit_cmd = app.add_subcommand("audit", "Diff effective rights against the policy");
  add_common(audit_cmd, common);
  audit_cmd->add_option("--granularity", granularity, "Granule in bytes");
  bind(audit_cmd, [&](const ProjectDocument& d, const Output& o) { return cmd_audit(d, o, granularity); });

  std::string strategy = "PerCallEscalation";
  std::string trace;
  std::vector<std::string> overrides;
  std::optional<double> target_clock;
  auto* simulate = app.add_subcommand("simulate", "Replay a trace under a protection strategy");
  add_common(simulate, common);
  simulate->add_option("--strategy", strategy, "PerCallEscalation (per-call) or SwitchTimeReconfig (switch-time)");
  simulate->add_option("--trace", trace, "Trace file");
  simulate->add_option("--regions", overrides, "Regions reloaded per switch, task=count");
  simulate->add_option("--target-clock-hz", target_clock, "Clock the costs are scaled to");
  bind(simulate, [&](const ProjectDocument& d, const Output& o) {
    return cmd_simulate(d, o, strategy, trace, overrides, target_clock);
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "mpulab: error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "mpulab: error: " << one_line(e.what()) << "\n";
  } catch (const json::exception& e) {
    err << "mpulab: error: " << one_line(e.what()) << "\n";
  } catch (const std::exception& e) {
    err << "mpulab: error: " << one_line(e.what()) << "\n";
  }
  return kExitUsage;
}

}  // namespace mpulab::cli
