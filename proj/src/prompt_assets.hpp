#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include <string_view>

#include "gmner/completion_parser.hpp"

namespace gmner::detail {

std::string_view prompt_asset_version();
std::string_view prompt_asset(TemplateId id);

}  // namespace gmner::detail
