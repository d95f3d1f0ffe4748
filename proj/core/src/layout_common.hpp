//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <span>

#include "mpulab/layout.hpp"

// Shared by the greedy packer and the exhaustive oracle. Only input checking
// and bookkeeping live here; neither search strategy is shared.
namespace mpulab::layout::detail {

void check_requests(std::span<const AllocationRequest> requests, unsigned region_budget);
unsigned regions_used(std::span<const AllocationRequest> requests);
/// Sorts each context's regions by address and numbers them from 0.
void number_regions(PackingPlan& plan);
std::uint64_t align_up(std::uint64_t value, std::uint64_t alignment);

}  // namespace mpulab::layout::detail
