// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace compagent::detail
{

inline auto is_space(char c) -> bool
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline auto trim(std::string_view s) -> std::string_view
{
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

/// Trims whitespace and any of `chars` from both ends.
inline auto strip(std::string_view s, std::string_view chars) -> std::string_view
{
    auto const drop = [&](char c) { return is_space(c) || chars.find(c) != std::string_view::npos; };
    while (!s.empty() && drop(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && drop(s.back()))
        s.remove_suffix(1);
    return s;
}

inline auto to_lower(std::string_view s) -> std::string
{
    auto out = std::string(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline auto iequals(std::string_view a, std::string_view b) -> bool
{
    return a.size() == b.size()
           && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
                  return std::tolower(x) == std::tolower(y);
              });
}

inline auto istarts_with(std::string_view s, std::string_view prefix) -> bool
{
    return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

/// Replaces every "{name}" occurrence in `tmpl`.
inline auto fill_slot(std::string tmpl, std::string_view name, std::string_view value) -> std::string
{
    auto const slot = std::string("{") + std::string(name) + "}";
    for (auto pos = tmpl.find(slot); pos != std::string::npos; pos = tmpl.find(slot, pos + value.size()))
        tmpl.replace(pos, slot.size(), value);
    return tmpl;
}

} // namespace compagent::detail
