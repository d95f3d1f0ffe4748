//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "document.hpp"

#include <fstream>

#include "mpulab/error.hpp"

namespace mpulab::cli {
namespace {

template <typename T>
std::vector<T> list_or_empty(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return {};
  if (!it->is_array()) throw Error(Errc::ParseError, std::string("field '") + key + "' must be an array");
  return it->get<std::vector<T>>();
}

}  // namespace

ProjectDocument document_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(Errc::ParseError, "document must be a JSON object");
  auto version = j.find("schema_version");
  if (version == j.end()) throw Error(Errc::ParseError, "missing field 'schema_version'");
  if (!version->is_number_integer() || version->get<int>() != kSchemaVersion) {
    throw Error(Errc::ParseError, "unsupported schema_version " + version->dump());
  }

  ProjectDocument doc;
  doc.config = j.get<mpu::MpuConfig>();
  doc.policy = list_or_empty<audit::PolicyRule>(j, "policy");
  doc.gates = list_or_empty<audit::GateSymbol>(j, "gates");
  if (j.contains("universe")) doc.universe = list_or_empty<AddressRange>(j, "universe");
  doc.requests = list_or_empty<layout::AllocationRequest>(j, "requests");
  if (j.contains("region_budget")) {
    doc.region_budget = static_cast<unsigned>(parse_number(j.at("region_budget"), "region_budget"));
  }
  doc.peripherals = list_or_empty<layout::PeripheralSpec>(j, "peripherals");
  doc.sections = list_or_empty<layout::SectionDescriptor>(j, "sections");
  if (auto it = j.find("trace"); it != j.end()) {
    if (!it->is_string()) throw Error(Errc::ParseError, "field 'trace' must be a path string");
    std::filesystem::path p = it->get<std::string>();
    doc.trace = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  if (auto it = j.find("regions_per_task"); it != j.end()) {
    if (!it->is_object()) throw Error(Errc::ParseError, "field 'regions_per_task' must be an object");
    for (const auto& [task, count] : it->items()) {
      doc.regions_per_task[task] = static_cast<unsigned>(parse_number(count, "regions_per_task"));
    }
  }
  if (auto it = j.find("cost_model"); it != j.end()) it->get_to(doc.cost_model);
  return doc;
}

json document_to_json(const ProjectDocument& doc) {
  json j = doc.config;
  j["schema_version"] = kSchemaVersion;
  j["policy"] = doc.policy;
  j["gates"] = doc.gates;
  if (doc.universe) j["universe"] = *doc.universe;
  j["requests"] = doc.requests;
  j["region_budget"] = doc.region_budget;
  j["peripherals"] = doc.peripherals;
  j["sections"] = doc.sections;
  if (doc.trace) j["trace"] = doc.trace->string();
  j["regions_per_task"] = doc.regions_per_task;
  j["cost_model"] = doc.cost_model;
  return j;
}

ProjectDocument load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot read '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
  return document_from_json(j, path.parent_path());
}

ProjectDocument freertos_document() {
  auto fixture = audit::freertos_fixture();
  ProjectDocument doc;
  doc.config = fixture.config;
  doc.policy = fixture.policy;
  doc.gates = fixture.gates;
  doc.universe = fixture.universe;
  return doc;
}

}  // namespace mpulab::cli
