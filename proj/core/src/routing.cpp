// SPDX-License-Identifier: Apache-2.0
#include <compagent/prompts.hpp>
#include <compagent/routing.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <regex>

namespace compagent
{

// {{{ ClusterMap

auto ClusterMap::defaults() -> ClusterMap
{
    auto map = ClusterMap {};
    map._tools = {
        { 1, { "object_detection", "content_moderation" } },
        { 2, { "face_detection", "content_moderation", "image_summary" } },
        { 3, { "text_detection", "image_summary" } },
        { 4, { "image_summary", "llavaguard_classification", "icm_assistant" } },
        { 5, {} },
    };
    return map;
}

auto ClusterMap::from_json(const nlohmann::json& json) -> ClusterMap
{
    if (!json.is_object())
        throw Error(ErrorKind::Config, "cluster map must be an object keyed by cluster id");

    auto map = ClusterMap {};
    for (auto const& [key, tools]: json.items())
    {
        auto id = 0;
        try
        {
            auto pos = std::size_t { 0 };
            id = std::stoi(key, &pos);
            if (pos != key.size())
                throw std::invalid_argument(key);
        }
        catch (const std::exception&)
        {
            throw Error(ErrorKind::Config, fmt::format("cluster map key '{}' is not a cluster id", key));
        }
        if (id < 1 || id > cluster_count)
            throw Error(ErrorKind::Config, fmt::format("cluster id {} outside 1..{}", id, cluster_count));
        if (!tools.is_array() || !std::all_of(tools.begin(), tools.end(), [](auto const& t) { return t.is_string(); }))
            throw Error(ErrorKind::Config, fmt::format("cluster {}: expected a list of tool names", id));
        map._tools[id] = tools.get<std::vector<std::string>>();
    }
    for (auto id = 1; id <= cluster_count; ++id)
        if (!map._tools.contains(id))
            throw Error(ErrorKind::Config, fmt::format("cluster map lacks cluster {}", id));
    if (!map._tools.at(cluster_count).empty())
        throw Error(ErrorKind::Config, "cluster 5 must map to no tools");
    return map;
}

auto ClusterMap::load(const std::filesystem::path& path) -> ClusterMap
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("cannot open cluster map {}", path.string()));
    auto const json = nlohmann::json::parse(in, nullptr, false);
    if (json.is_discarded())
        throw Error(ErrorKind::Config, fmt::format("{}: not valid JSON", path.string()));
    return from_json(json);
}

auto ClusterMap::tools_for(int cluster) const -> const std::vector<std::string>&
{
    auto const it = _tools.find(cluster);
    if (it == _tools.end())
        throw Error(ErrorKind::RoutingParse, fmt::format("no tools for cluster {}", cluster));
    return it->second;
}

auto ClusterMap::to_json() const -> nlohmann::json
{
    auto json = nlohmann::json::object();
    for (auto const& [id, tools]: _tools)
        json[std::to_string(id)] = tools;
    return json;
}

void ClusterMap::validate(const ToolRegistry& registry) const
{
    for (auto const& [id, tools]: _tools)
        for (auto const& tool: tools)
            if (!registry.contains(tool))
                throw Error(ErrorKind::Config, fmt::format("cluster {} maps unknown tool '{}'", id, tool));
}

// }}}

auto parse_route(std::string_view text) -> RouteDecision
{
    auto const description = extract_tag(text, "description");
    auto const cluster = extract_tag(text, "cluster");
    auto const reasoning = extract_tag(text, "reasoning");
    if (!description || detail::trim(*description).empty())
        throw Error(ErrorKind::RoutingParse, "routing reply lacks a <description> tag");
    if (!cluster)
        throw Error(ErrorKind::RoutingParse, "routing reply lacks a <cluster> tag");
    if (!reasoning)
        throw Error(ErrorKind::RoutingParse, "routing reply lacks a <reasoning> tag");

    static auto const pattern = std::regex(R"(^cluster\s+([0-9]+)$)", std::regex::icase);
    auto const token = std::string(detail::strip(*cluster, "\"'"));
    auto match = std::smatch {};
    if (!std::regex_match(token, match, pattern))
        throw Error(ErrorKind::RoutingParse, fmt::format("cluster token '{}' is not 'Cluster N'", token));
    auto const digits = match[1].str();
    auto const id = digits.size() > 1 ? 0 : std::stoi(digits); // no leading zeros or multi-digit ids
    if (id < 1 || id > cluster_count)
        throw Error(ErrorKind::RoutingParse, fmt::format("cluster {} is outside 1..{}", digits, cluster_count));

    return RouteDecision { *description, id, *reasoning };
}

namespace
{

/// Routing call that also hands back the raw reply for the trace.
auto route_raw(const ImageRef& image, ChatClient& llm, const ModelSettings& model, std::string& raw) -> RouteDecision
{
    raw = llm.complete(ChatRequest {
                           .system_text = prompts::routing_system(),
                           .user_text = std::string(prompts::routing_user),
                           .image = image,
                           .model_id = model.model_id,
                           .decoding = model.decoding,
                           .session_id = image.id,
                       })
              .text;
    try
    {
        return parse_route(raw);
    }
    catch (const Error& e)
    {
        throw ModelOutputError(e.kind(), e.what(), { raw });
    }
}

} // namespace

auto route(const ImageRef& image, ChatClient& llm, const ModelSettings& model) -> RouteDecision
{
    auto raw = std::string {};
    return route_raw(image, llm, model, raw);
}

// {{{ metadata fusion

namespace
{

void append_output(std::string& out, const ToolOutput& output)
{
    if (!output.detections.empty())
    {
        auto sorted = output.detections;
        std::stable_sort(sorted.begin(), sorted.end(), [](auto const& a, auto const& b) { return a.score > b.score; });
        out += "detections:\n";
        for (auto const& d: sorted)
        {
            out += fmt::format("- {}: {}", d.label, d.score);
            if (d.bbox)
                out += fmt::format(" bbox({}, {}, {}, {})", d.bbox->left, d.bbox->top, d.bbox->width, d.bbox->height);
            if (d.text)
                out += fmt::format(" text \"{}\"", *d.text);
            out += '\n';
        }
    }
    if (output.summary)
        out += fmt::format("summary: {}\n", *output.summary);
    if (!output.moderation_labels.empty())
    {
        auto sorted = output.moderation_labels;
        std::stable_sort(sorted.begin(), sorted.end(), [](auto const& a, auto const& b) { return a.score > b.score; });
        out += "moderation_labels:\n";
        for (auto const& m: sorted)
            out += m.severity ? fmt::format("- {}: {} severity {}\n", m.label, m.score, *m.severity)
                              : fmt::format("- {}: {}\n", m.label, m.score);
    }
    if (!output.extra.empty())
    {
        out += "extra:\n";
        for (auto const& [key, value]: output.extra)
            out += fmt::format("- {}: {}\n", key, value);
    }
}

} // namespace

auto fuse_metadata(std::span<const Evidence> results) -> std::string
{
    if (results.empty())
        return std::string(empty_metadata);

    auto out = std::string {};
    for (auto const& result: results)
    {
        if (!out.empty())
            out += '\n';
        out += fmt::format("[{}]\n", result.tool_name);
        if (result.output)
            append_output(out, *result.output);
        else if (result.error)
            out += fmt::format("error: {}\n", result.error->message);
    }
    return out;
}

auto fuse_metadata(std::span<const ToolOutput> outputs) -> std::string
{
    auto results = std::vector<Evidence> {};
    results.reserve(outputs.size());
    for (auto const& output: outputs)
        results.push_back(Evidence { results.size(), output.tool_name, nlohmann::json::object(), output, std::nullopt, 0 });
    return fuse_metadata(results);
}

// }}}

namespace
{

using Clock = std::chrono::steady_clock;

auto ms_since(Clock::time_point start) -> std::int64_t
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

/// Single tagged-format assessment call.
auto tagged_assessment(const ImageRef& image, const Policy& policy, ChatClient& llm, const ModelSettings& model,
                       std::string system, std::string user, TraceRecord& trace) -> Assessment
{
    auto const reply = llm.complete(ChatRequest {
        .system_text = std::move(system),
        .user_text = std::move(user),
        .image = image,
        .model_id = model.model_id,
        .decoding = model.decoding,
        .session_id = image.id,
    });
    trace.raw_model_texts.push_back(reply.text);
    return parse_tagged_assessment(reply.text, policy);
}

auto run_failure(TraceRecord& trace, const Error& e, Clock::time_point started) -> RunFailure
{
    trace.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
    trace.timings.total_ms = ms_since(started);
    return RunFailure(e.kind(), e.what(), trace);
}

} // namespace

auto assess_with_routing(const ImageRef& image, std::shared_ptr<const Policy> policy, const ToolRegistry& registry,
                         const ClusterMap& clusters, ChatClient& llm, const ModelSettings& router,
                         const ModelSettings& assessor) -> TraceRecord
{
    auto const started = Clock::now();
    auto trace = TraceRecord {};
    trace.image_id = image.id;
    trace.policy_id = policy->id;
    trace.pipeline = "routing";

    try
    {
        auto raw = std::string {};
        auto decision = RouteDecision {};
        try
        {
            decision = route_raw(image, llm, router, raw);
            trace.raw_model_texts.push_back(raw);
        }
        catch (const ModelOutputError& e)
        {
            trace.raw_model_texts = e.raw_texts();
            throw;
        }
        trace.timings.planning_ms = ms_since(started);
        trace.route = decision;

        auto evidence = std::vector<Evidence> {};
        auto const action = fmt::format("Cluster {}", decision.cluster);
        for (auto const& tool: clusters.tools_for(decision.cluster))
        {
            if (!registry.is_enabled(tool))
                continue;
            auto execution = registry.execute_tool(tool, image, nlohmann::json::object());
            trace.timings.tools_ms += execution.elapsed_ms;
            evidence.push_back(Evidence::from_execution(evidence.size(), nlohmann::json::object(), std::move(execution)));
            trace.trajectory.push_back(tool);
            trace.steps.push_back({ action, evidence.back() });
        }

        auto const verify_started = Clock::now();
        auto assessment = tagged_assessment(
            image, *policy, llm, assessor, prompts::policy_assessment_system(*policy, true),
            prompts::policy_assessment_user(fuse_metadata(evidence), fmt::format("{}\n{}", action, decision.reasoning)),
            trace);
        trace.timings.verification_ms = ms_since(verify_started);
        trace.category_display = policy->display(assessment.category);
        trace.assessment = std::move(assessment);
    }
    catch (const Error& e)
    {
        throw run_failure(trace, e, started);
    }
    trace.timings.total_ms = ms_since(started);
    return trace;
}

auto zero_shot_assess(const ImageRef& image, std::shared_ptr<const Policy> policy, ChatClient& llm,
                      const ModelSettings& model) -> TraceRecord
{
    auto const started = Clock::now();
    auto trace = TraceRecord {};
    trace.image_id = image.id;
    trace.policy_id = policy->id;
    trace.pipeline = "zero_shot";
    try
    {
        auto assessment = tagged_assessment(image, *policy, llm, model, prompts::policy_assessment_system(*policy, false),
                                            std::string(prompts::zero_shot_user), trace);
        trace.category_display = policy->display(assessment.category);
        trace.assessment = std::move(assessment);
    }
    catch (const Error& e)
    {
        throw run_failure(trace, e, started);
    }
    trace.timings.total_ms = ms_since(started);
    trace.timings.verification_ms = trace.timings.total_ms;
    return trace;
}

} // namespace compagent
