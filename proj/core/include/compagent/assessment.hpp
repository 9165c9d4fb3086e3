// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/policy.hpp>

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace compagent
{

enum class Rating
{
    Safe,
    Unsafe,
};

auto to_string(Rating rating) -> std::string_view;

/// Accepts exactly "Safe" or "Unsafe" after trimming quotes/whitespace and
/// case-folding.
auto parse_rating(std::string_view text) -> std::optional<Rating>;

struct Assessment
{
    Rating rating = Rating::Safe;
    CategoryLabel category;
    std::string rationale;

    auto operator==(const Assessment&) const -> bool = default;
};

/// {"rating": "...", "category": "<code>: <title>", "rationale": "..."}
auto to_json(const Assessment& assessment, const Policy& policy) -> nlohmann::json;
auto render_json(const Assessment& assessment, const Policy& policy) -> std::string;

/// <rating>..</rating><category>..</category><rationale>..</rationale>
auto render_tagged(const Assessment& assessment, const Policy& policy) -> std::string;

/// JSON object first (the first balanced object carrying a "rating" key),
/// then the tagged format. Throws Error{AssessmentParse | UnknownCategory}.
auto parse_assessment(std::string_view text, const Policy& policy) -> Assessment;

/// Nothing when the text holds no JSON object with a "rating" key; throws
/// when such an object exists but is invalid.
auto parse_json_assessment(std::string_view text, const Policy& policy) -> std::optional<Assessment>;

/// Tagged format only. Throws Error{AssessmentParse | UnknownCategory}.
auto parse_tagged_assessment(std::string_view text, const Policy& policy) -> Assessment;

/// Balanced {...} spans in order of their opening brace, skipping braces
/// inside JSON string literals. Nested spans are not reported separately.
auto scan_json_objects(std::string_view text) -> std::vector<std::string_view>;

/// Contents of the first <tag>...</tag> pair (case-insensitive tag names).
auto extract_tag(std::string_view text, std::string_view tag) -> std::optional<std::string>;

} // namespace compagent
