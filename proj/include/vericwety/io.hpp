// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace vericwety::io {

std::string read_text(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a half-written artifact.
void write_text(const std::filesystem::path& path, std::string_view content);

nlohmann::json read_json(const std::filesystem::path& path);

/// Calls fn once per non-blank line of a JSONL file. Parse errors are
/// reported with the file and line number.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&)>& fn);

}  // namespace vericwety::io
