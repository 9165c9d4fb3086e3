// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace compagent
{

struct BundleFinding
{
    std::string kind; // missing_fixture | unknown_tool | unknown_image | unknown_session | missing_image | invalid
    std::string detail;

    auto operator==(const BundleFinding&) const -> bool = default;
};

/// Cross-checks manifest.jsonl ids against fixtures/<tool>/<id>.json and the
/// tool calls and sessions of scripts/*.jsonl. Empty result = valid bundle.
auto validate_bundle(const std::filesystem::path& root) -> std::vector<BundleFinding>;

} // namespace compagent
