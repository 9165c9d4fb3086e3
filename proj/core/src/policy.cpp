// SPDX-License-Identifier: Apache-2.0
#include <compagent/error.hpp>
#include <compagent/policy.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace compagent
{

namespace
{

auto require_string(const nlohmann::json& obj, const char* key, std::string_view where) -> std::string
{
    if (!obj.contains(key) || !obj.at(key).is_string())
        throw Error(ErrorKind::MalformedDocument, fmt::format("{}: missing string field '{}'", where, key));
    return obj.at(key).get<std::string>();
}

auto rule_list(const nlohmann::json& obj, const char* key, std::string_view where) -> std::vector<std::string>
{
    auto rules = std::vector<std::string> {};
    if (!obj.contains(key))
        return rules;
    auto const& arr = obj.at(key);
    if (!arr.is_array())
        throw Error(ErrorKind::MalformedDocument, fmt::format("{}: '{}' must be a list", where, key));
    for (auto const& item: arr)
    {
        if (!item.is_string())
            throw Error(ErrorKind::MalformedDocument, fmt::format("{}: '{}' entries must be strings", where, key));
        auto rule = std::string(detail::trim(item.get<std::string>()));
        if (rule.empty() || rule.find('\n') != std::string::npos)
            throw Error(ErrorKind::MalformedDocument,
                        fmt::format("{}: '{}' entries must be non-empty single lines", where, key));
        rules.push_back(std::move(rule));
    }
    return rules;
}

auto leading_token(std::string_view text) -> std::string_view
{
    auto const colon = text.find(':');
    return detail::strip(colon == std::string_view::npos ? text : text.substr(0, colon), "\"'()[]*");
}

/// "O7", "o07", "7" all map to "#7"; anything else is returned upper-cased.
auto canonical_code(std::string_view code) -> std::string
{
    auto digits = code;
    if (!digits.empty() && (digits.front() == 'O' || digits.front() == 'o'))
        digits.remove_prefix(1);
    auto const numeric = !digits.empty()
                         && std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); });
    if (!numeric)
    {
        auto upper = std::string(code);
        for (auto& c: upper)
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return upper;
    }
    while (digits.size() > 1 && digits.front() == '0')
        digits.remove_prefix(1);
    return "#" + std::string(digits);
}

} // namespace

auto Policy::find(std::string_view code) const -> const PolicyCategory*
{
    for (auto const& category: categories)
        if (category.code == code)
            return &category;
    return nullptr;
}

auto Policy::display(const CategoryLabel& label) const -> std::string
{
    if (label.is_na())
        return na_label;
    if (auto const* category = find(label.code()))
        return fmt::format("{}: {}", category->code, category->title);
    return label.code();
}

auto Policy::na_code() const -> std::string
{
    return std::string(leading_token(na_label));
}

auto load_policy(const nlohmann::json& document) -> Policy
{
    if (!document.is_object())
        throw Error(ErrorKind::MalformedDocument, "policy document must be an object");

    auto policy = Policy {};
    policy.id = require_string(document, "id", "policy");
    policy.name = require_string(document, "name", "policy");
    policy.na_label = require_string(document, "na_label", "policy");
    if (policy.id.empty() || detail::trim(policy.na_label).empty())
        throw Error(ErrorKind::MalformedDocument, "policy: id and na_label must be non-empty");

    if (!document.contains("categories") || !document.at("categories").is_array()
        || document.at("categories").empty())
        throw Error(ErrorKind::MalformedDocument, "policy: at least one category is required");

    auto const na = canonical_code(policy.na_code());
    auto seen = std::set<std::string> {};
    for (auto const& entry: document.at("categories"))
    {
        if (!entry.is_object())
            throw Error(ErrorKind::MalformedDocument, "policy: category entries must be objects");
        auto category = PolicyCategory {};
        category.code = std::string(detail::trim(require_string(entry, "code", "category")));
        auto const where = fmt::format("category '{}'", category.code);
        category.title = std::string(detail::trim(require_string(entry, "title", where)));
        if (category.code.empty() || category.code.find(':') != std::string::npos)
            throw Error(ErrorKind::MalformedDocument, "category code must be non-empty and contain no ':'");
        if (category.title.empty())
            throw Error(ErrorKind::MalformedDocument, fmt::format("{}: empty title", where));
        category.should_not = rule_list(entry, "should_not", where);
        category.can = rule_list(entry, "can", where);

        auto const canon = canonical_code(category.code);
        if (canon == na)
            throw Error(ErrorKind::DuplicateCode, fmt::format("{}: collides with the NA label", where));
        if (!seen.insert(canon).second)
            throw Error(ErrorKind::DuplicateCode, fmt::format("duplicate category code '{}'", category.code));
        if (category.should_not.empty())
            throw Error(ErrorKind::EmptyRuleList, fmt::format("{}: empty 'should_not' list", where));
        policy.categories.push_back(std::move(category));
    }
    return policy;
}

auto load_policy_file(const std::filesystem::path& path) -> Policy
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("cannot open policy file {}", path.string()));
    auto document = nlohmann::json::parse(in, nullptr, false);
    if (document.is_discarded())
        throw Error(ErrorKind::MalformedDocument, fmt::format("{}: not valid JSON", path.string()));
    return load_policy(document);
}

auto to_json(const Policy& policy) -> nlohmann::json
{
    auto categories = nlohmann::json::array();
    for (auto const& c: policy.categories)
        categories.push_back({ { "code", c.code }, { "title", c.title }, { "should_not", c.should_not }, { "can", c.can } });
    return {
        { "id", policy.id },
        { "name", policy.name },
        { "na_label", policy.na_label },
        { "categories", std::move(categories) },
    };
}

auto render_policy_text(const Policy& policy) -> std::string
{
    auto out = std::string {};
    for (auto i = std::size_t { 0 }; i < policy.categories.size(); ++i)
    {
        auto const& c = policy.categories[i];
        if (i > 0)
            out += '\n';
        out += fmt::format("{}: {}\nShould not:\n", c.code, c.title);
        for (auto const& rule: c.should_not)
            out += fmt::format("- {}\n", rule);
        if (!c.can.empty())
        {
            out += "Can:\n";
            for (auto const& rule: c.can)
                out += fmt::format("- {}\n", rule);
        }
    }
    return out;
}

auto parse_policy_text(std::string_view text) -> std::vector<PolicyCategory>
{
    enum class Section { None, ShouldNot, Can };

    auto categories = std::vector<PolicyCategory> {};
    auto section = Section::None;
    auto stream = std::istringstream(std::string(text));
    for (auto line = std::string {}; std::getline(stream, line);)
    {
        auto const trimmed = detail::trim(line);
        if (trimmed.empty())
            continue;
        if (trimmed == "Should not:")
            section = Section::ShouldNot;
        else if (trimmed == "Can:")
            section = Section::Can;
        else if (trimmed.starts_with("- "))
        {
            if (categories.empty() || section == Section::None)
                throw Error(ErrorKind::MalformedDocument, fmt::format("rule outside a category: '{}'", trimmed));
            auto& rules = section == Section::ShouldNot ? categories.back().should_not : categories.back().can;
            rules.emplace_back(detail::trim(trimmed.substr(2)));
        }
        else
        {
            auto const colon = trimmed.find(':');
            if (colon == std::string_view::npos)
                throw Error(ErrorKind::MalformedDocument, fmt::format("expected 'code: title', got '{}'", trimmed));
            categories.push_back(PolicyCategory {
                .code = std::string(detail::trim(trimmed.substr(0, colon))),
                .title = std::string(detail::trim(trimmed.substr(colon + 1))),
                .should_not = {},
                .can = {},
            });
            section = Section::None;
        }
    }
    return categories;
}

auto normalize_category(std::string_view raw, const Policy& policy) -> CategoryLabel
{
    auto token = leading_token(detail::strip(raw, "\"'()[]*"));
    if (detail::istarts_with(token, "category "))
        token = detail::trim(token.substr(9));
    if (token.empty())
        throw Error(ErrorKind::UnknownCategory, fmt::format("unknown category '{}'", raw));

    if (detail::iequals(token, policy.na_code()))
        return CategoryLabel::na();

    for (auto const& category: policy.categories)
        if (detail::iequals(token, category.code))
            return CategoryLabel::of(category.code);

    auto const canon = canonical_code(token);
    for (auto const& category: policy.categories)
        if (canonical_code(category.code) == canon)
            return CategoryLabel::of(category.code);

    throw Error(ErrorKind::UnknownCategory, fmt::format("unknown category '{}'", raw));
}

} // namespace compagent
