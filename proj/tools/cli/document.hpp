//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json_io.hpp"

namespace mpulab::cli {

/// Everything a batch run may need. Sections that a command does not use may
/// be absent from the file.
struct ProjectDocument {
  mpu::MpuConfig config;
  audit::Policy policy;
  std::vector<audit::GateSymbol> gates;
  /// Bands diff_policy walks; the default audit universe when absent.
  std::optional<std::vector<AddressRange>> universe;
  std::vector<layout::AllocationRequest> requests;
  unsigned region_budget = 8;
  std::vector<layout::PeripheralSpec> peripherals;
  std::vector<layout::SectionDescriptor> sections;
  /// Trace file, resolved against the document's directory.
  std::optional<std::filesystem::path> trace;
  std::map<std::string, unsigned> regions_per_task;
  overhead::CostModel cost_model;

  friend bool operator==(const ProjectDocument&, const ProjectDocument&) = default;
};

/// Throws Error(ParseError) on a missing or unsupported schema_version,
/// missing required fields or unknown enum spellings.
[[nodiscard]] ProjectDocument document_from_json(const json& j,
                                                 const std::filesystem::path& base_dir = {});
[[nodiscard]] json document_to_json(const ProjectDocument& doc);
/// Reads and parses a document file; errors name the file.
[[nodiscard]] ProjectDocument load_document(const std::filesystem::path& path);

/// The FreeRTOS reference layout as a document.
[[nodiscard]] ProjectDocument freertos_document();

}  // namespace mpulab::cli
