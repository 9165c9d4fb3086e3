// SPDX-License-Identifier: Apache-2.0
#include <compagent/assessment.hpp>
#include <compagent/error.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <regex>

namespace compagent
{

namespace
{

auto parse_error(std::string_view why, std::string_view text) -> Error
{
    return Error(ErrorKind::AssessmentParse, fmt::format("{}; model output: {}", why, text.substr(0, 400)));
}

auto string_field(const nlohmann::json& obj, const char* key) -> std::optional<std::string>
{
    if (!obj.contains(key) || !obj.at(key).is_string())
        return std::nullopt;
    return obj.at(key).get<std::string>();
}

/// Lenient JSON: tolerates trailing commas and the doubled braces of
/// template-style prompts.
auto parse_lenient(std::string_view span) -> nlohmann::json
{
    auto json = nlohmann::json::parse(span, nullptr, false);
    if (!json.is_discarded())
        return json;

    auto cleaned = std::regex_replace(std::string(span), std::regex(R"(,(\s*[}\]]))"), "$1");
    auto trimmed = detail::trim(cleaned);
    while (trimmed.size() >= 4 && trimmed.starts_with("{{") && trimmed.ends_with("}}"))
        trimmed = detail::trim(trimmed.substr(1, trimmed.size() - 2));
    return nlohmann::json::parse(trimmed, nullptr, false);
}

auto build(std::string_view rating_text, std::string_view category_text, std::string_view rationale_text,
           const Policy& policy, std::string_view raw) -> Assessment
{
    auto const rating = parse_rating(rating_text);
    if (!rating)
        throw parse_error(fmt::format("invalid rating '{}'", rating_text), raw);
    auto const rationale = detail::strip(rationale_text, "\"");
    if (rationale.empty())
        throw parse_error("empty rationale", raw);
    if (detail::trim(category_text).empty())
        throw parse_error("empty category", raw);
    return Assessment {
        .rating = *rating,
        .category = normalize_category(category_text, policy),
        .rationale = std::string(rationale),
    };
}

} // namespace

auto to_string(Rating rating) -> std::string_view
{
    return rating == Rating::Unsafe ? "Unsafe" : "Safe";
}

auto parse_rating(std::string_view text) -> std::optional<Rating>
{
    auto const value = detail::strip(text, "\"'");
    if (detail::iequals(value, "safe"))
        return Rating::Safe;
    if (detail::iequals(value, "unsafe"))
        return Rating::Unsafe;
    return std::nullopt;
}

auto to_json(const Assessment& assessment, const Policy& policy) -> nlohmann::json
{
    return {
        { "rating", to_string(assessment.rating) },
        { "category", policy.display(assessment.category) },
        { "rationale", assessment.rationale },
    };
}

auto render_json(const Assessment& assessment, const Policy& policy) -> std::string
{
    return to_json(assessment, policy).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

auto render_tagged(const Assessment& assessment, const Policy& policy) -> std::string
{
    return fmt::format("<rating>{}</rating>\n<category>{}</category>\n<rationale>{}</rationale>",
                       to_string(assessment.rating), policy.display(assessment.category), assessment.rationale);
}

auto scan_json_objects(std::string_view text) -> std::vector<std::string_view>
{
    auto spans = std::vector<std::string_view> {};
    auto depth = 0;
    auto start = std::size_t { 0 };
    auto in_string = false;
    auto escaped = false;
    for (auto i = std::size_t { 0 }; i < text.size(); ++i)
    {
        auto const c = text[i];
        if (in_string)
        {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"' && depth > 0)
            in_string = true;
        else if (c == '{')
        {
            if (depth++ == 0)
                start = i;
        }
        else if (c == '}' && depth > 0 && --depth == 0)
            spans.push_back(text.substr(start, i - start + 1));
    }
    return spans;
}

auto extract_tag(std::string_view text, std::string_view tag) -> std::optional<std::string>
{
    auto const lower = detail::to_lower(text);
    auto const open = fmt::format("<{}>", detail::to_lower(tag));
    auto const close = fmt::format("</{}>", detail::to_lower(tag));
    auto const begin = lower.find(open);
    if (begin == std::string::npos)
        return std::nullopt;
    auto const content = begin + open.size();
    auto const end = lower.find(close, content);
    if (end == std::string::npos)
        return std::nullopt;
    return std::string(detail::trim(text.substr(content, end - content)));
}

auto parse_json_assessment(std::string_view text, const Policy& policy) -> std::optional<Assessment>
{
    for (auto const span: scan_json_objects(text))
    {
        auto const json = parse_lenient(span);
        if (json.is_discarded() || !json.is_object() || !json.contains("rating"))
            continue;
        auto const rating = string_field(json, "rating");
        auto const category = string_field(json, "category");
        auto const rationale = string_field(json, "rationale");
        if (!rating || !category || !rationale)
            throw parse_error("JSON assessment needs string fields rating, category and rationale", text);
        return build(*rating, *category, *rationale, policy, text);
    }
    return std::nullopt;
}

auto parse_tagged_assessment(std::string_view text, const Policy& policy) -> Assessment
{
    auto const rating = extract_tag(text, "rating");
    auto const category = extract_tag(text, "category");
    auto const rationale = extract_tag(text, "rationale");
    if (!rating || !category || !rationale)
        throw parse_error("expected <rating>, <category> and <rationale> tags", text);
    return build(*rating, *category, *rationale, policy, text);
}

auto parse_assessment(std::string_view text, const Policy& policy) -> Assessment
{
    if (detail::trim(text).empty())
        throw parse_error("empty model output", text);
    if (auto assessment = parse_json_assessment(text, policy))
        return std::move(*assessment);
    if (!extract_tag(text, "rating"))
        throw parse_error("neither a JSON assessment nor assessment tags found", text);
    return parse_tagged_assessment(text, policy);
}

} // namespace compagent
