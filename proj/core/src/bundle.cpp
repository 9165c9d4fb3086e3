// SPDX-License-Identifier: Apache-2.0
#include <compagent/bundle.hpp>
#include <compagent/error.hpp>
#include <compagent/eval.hpp>
#include <compagent/llm_client.hpp>
#include <compagent/tool_suite.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace compagent
{

namespace
{

namespace fs = std::filesystem;

/// Tool names named on CALL lines of a model reply.
auto called_tools(std::string_view text) -> std::vector<std::string>
{
    auto names = std::vector<std::string> {};
    auto stream = std::istringstream(std::string(text));
    for (auto line = std::string {}; std::getline(stream, line);)
    {
        auto const trimmed = detail::strip(line, "`*>");
        if (!detail::istarts_with(trimmed, "CALL ") && !detail::istarts_with(trimmed, "CALL\t"))
            continue;
        auto const rest = detail::trim(trimmed.substr(5));
        names.emplace_back(rest.substr(0, std::min(rest.find_first_of(" \t{"), rest.size())));
    }
    return names;
}

auto sorted_entries(const fs::path& dir) -> std::vector<fs::directory_entry>
{
    auto entries = std::vector<fs::directory_entry>(fs::directory_iterator(dir), fs::directory_iterator {});
    std::sort(entries.begin(), entries.end(), [](auto const& a, auto const& b) { return a.path() < b.path(); });
    return entries;
}

} // namespace

auto validate_bundle(const fs::path& root) -> std::vector<BundleFinding>
{
    auto findings = std::vector<BundleFinding> {};
    auto const add = [&](std::string kind, std::string detail) {
        findings.push_back({ std::move(kind), std::move(detail) });
    };

    auto samples = std::vector<Sample> {};
    try
    {
        samples = load_manifest(root / "manifest.jsonl");
    }
    catch (const Error& e)
    {
        add("invalid", e.what());
        return findings;
    }

    auto ids = std::set<std::string> {};
    for (auto const& sample: samples)
    {
        ids.insert(sample.id);
        if (!is_remote_location(sample.image.location) && !fs::exists(sample.image.location))
            add("missing_image", fmt::format("sample {}: {} does not exist", sample.id, sample.image.location));
    }

    auto tools = std::set<std::string> {};
    for (auto const& descriptor: bundled_descriptors())
        tools.insert(descriptor.name);

    auto const fixtures = root / "fixtures";
    for (auto const& tool: tools)
        for (auto const& id: ids)
            if (!fs::exists(fixtures / tool / (id + ".json")))
                add("missing_fixture", fmt::format("tool {} image {}", tool, id));
    if (fs::is_directory(fixtures))
        for (auto const& dir: sorted_entries(fixtures))
        {
            auto const tool = dir.path().filename().string();
            if (!dir.is_directory() || !tools.contains(tool))
            {
                add("unknown_tool", fmt::format("fixture directory {}", tool));
                continue;
            }
            for (auto const& file: sorted_entries(dir.path()))
                if (!ids.contains(file.path().stem().string()))
                    add("unknown_image", fmt::format("fixture {}/{}", tool, file.path().filename().string()));
        }

    auto const scripts = root / "scripts";
    if (!fs::is_directory(scripts))
    {
        add("invalid", "scripts directory missing");
        return findings;
    }
    for (auto const& file: sorted_entries(scripts))
    {
        if (file.path().extension() != ".jsonl")
            continue;
        auto entries = std::vector<ScriptEntry> {};
        try
        {
            entries = load_script(file.path());
        }
        catch (const Error& e)
        {
            add("invalid", e.what());
            continue;
        }
        auto const name = file.path().filename().string();
        for (auto const& entry: entries)
        {
            if (!entry.session.empty() && !ids.contains(entry.session))
                add("unknown_session", fmt::format("{}: session {}", name, entry.session));
            for (auto const& tool: called_tools(entry.response_text))
                if (!tools.contains(tool))
                    add("unknown_tool", fmt::format("{}: session {} calls {}", name, entry.session, tool));
        }
    }
    return findings;
}

} // namespace compagent
