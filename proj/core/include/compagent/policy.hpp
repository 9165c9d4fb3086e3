// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace compagent
{

struct PolicyCategory
{
    std::string code;
    std::string title;
    std::vector<std::string> should_not;
    std::vector<std::string> can;

    auto operator==(const PolicyCategory&) const -> bool = default;
};

/// Either a category code of the active policy, or the no-violation label.
class CategoryLabel
{
  public:
    CategoryLabel() = default; // NA

    static auto na() -> CategoryLabel { return {}; }
    static auto of(std::string code) -> CategoryLabel
    {
        auto label = CategoryLabel {};
        label._code = std::move(code);
        return label;
    }

    [[nodiscard]] auto is_na() const noexcept -> bool { return !_code.has_value(); }
    [[nodiscard]] auto code() const -> const std::string& { return _code.value(); }

    auto operator==(const CategoryLabel&) const -> bool = default;

  private:
    std::optional<std::string> _code;
};

class Policy
{
  public:
    std::string id;
    std::string name;
    std::string na_label; // e.g. "NA: None applying"
    std::vector<PolicyCategory> categories;

    [[nodiscard]] auto find(std::string_view code) const -> const PolicyCategory*;

    /// "O3: Sexual Content" for a code, the NA label otherwise.
    [[nodiscard]] auto display(const CategoryLabel& label) const -> std::string;

    /// Leading token of na_label ("NA").
    [[nodiscard]] auto na_code() const -> std::string;

    auto operator==(const Policy&) const -> bool = default;
};

/// Validates and builds a policy from its structured document form.
/// Throws Error{MalformedDocument | DuplicateCode | EmptyRuleList}.
auto load_policy(const nlohmann::json& document) -> Policy;
auto load_policy_file(const std::filesystem::path& path) -> Policy;

auto to_json(const Policy& policy) -> nlohmann::json;

/// Deterministic prompt block: per category a "code: title" header, a
/// "Should not:" list and, when non-empty, a "Can:" list.
auto render_policy_text(const Policy& policy) -> std::string;

/// Inverse of render_policy_text for the category list.
auto parse_policy_text(std::string_view text) -> std::vector<PolicyCategory>;

/// Case-insensitive match of the leading code token against the policy.
/// Throws Error{UnknownCategory} carrying the raw text.
auto normalize_category(std::string_view raw, const Policy& policy) -> CategoryLabel;

} // namespace compagent
