// SPDX-License-Identifier: Apache-2.0
#include <compagent/trace.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <fstream>

namespace compagent
{

auto to_json(const TraceRecord& trace, bool include_timings) -> nlohmann::json
{
    auto steps = nlohmann::json::array();
    for (auto const& step: trace.steps)
        steps.push_back({ { "action_raw", step.action_raw }, { "evidence", to_json(step.evidence, include_timings) } });

    auto json = nlohmann::json {
        { "image_id", trace.image_id },
        { "policy_id", trace.policy_id },
        { "pipeline", trace.pipeline },
        { "trajectory", trace.trajectory },
        { "steps", std::move(steps) },
        { "truncated", trace.truncated },
        { "raw_model_texts", trace.raw_model_texts },
        { "assessment", nullptr },
    };
    if (trace.assessment)
    {
        auto const& a = *trace.assessment;
        json["assessment"] = {
            { "rating", to_string(a.rating) },
            { "category", trace.category_display },
            { "category_code", a.category.is_na() ? nlohmann::json(nullptr) : nlohmann::json(a.category.code()) },
            { "rationale", a.rationale },
        };
    }
    if (trace.route)
        json["route"] = {
            { "cluster", trace.route->cluster },
            { "description", trace.route->description },
            { "reasoning", trace.route->reasoning },
        };
    if (trace.error)
        json["error"] = *trace.error;
    if (include_timings)
        json["timings"] = {
            { "total_ms", trace.timings.total_ms },
            { "planning_ms", trace.timings.planning_ms },
            { "tools_ms", trace.timings.tools_ms },
            { "verification_ms", trace.timings.verification_ms },
        };
    return json;
}

auto trace_from_json(const nlohmann::json& json) -> TraceRecord
{
    if (!json.is_object())
        throw Error(ErrorKind::TraceParse, "trace record must be a JSON object");
    try
    {
        auto trace = TraceRecord {};
        trace.image_id = json.at("image_id").get<std::string>();
        trace.policy_id = json.value("policy_id", std::string {});
        trace.pipeline = json.value("pipeline", std::string {});
        trace.trajectory = json.value("trajectory", std::vector<std::string> {});
        trace.truncated = json.value("truncated", false);
        trace.raw_model_texts = json.value("raw_model_texts", std::vector<std::string> {});
        for (auto const& step: json.value("steps", nlohmann::json::array()))
            trace.steps.push_back({ step.value("action_raw", std::string {}), evidence_from_json(step.at("evidence")) });

        if (json.contains("assessment") && !json["assessment"].is_null())
        {
            auto const& a = json["assessment"];
            auto const rating = parse_rating(a.at("rating").get<std::string>());
            if (!rating)
                throw Error(ErrorKind::TraceParse, "assessment has an invalid rating");
            auto const& code = a.value("category_code", nlohmann::json(nullptr));
            trace.assessment = Assessment {
                .rating = *rating,
                .category = code.is_string() ? CategoryLabel::of(code.get<std::string>()) : CategoryLabel::na(),
                .rationale = a.value("rationale", std::string {}),
            };
            trace.category_display = a.value("category", std::string {});
        }
        if (json.contains("route"))
        {
            auto const& r = json["route"];
            trace.route = RouteDecision { r.value("description", std::string {}), r.at("cluster").get<int>(),
                                          r.value("reasoning", std::string {}) };
        }
        if (json.contains("error"))
            trace.error = json["error"].get<std::string>();
        if (json.contains("timings"))
        {
            auto const& t = json["timings"];
            trace.timings = { t.value("total_ms", std::int64_t { 0 }), t.value("planning_ms", std::int64_t { 0 }),
                              t.value("tools_ms", std::int64_t { 0 }), t.value("verification_ms", std::int64_t { 0 }) };
        }
        if (trace.trajectory.size() != trace.steps.size())
            throw Error(ErrorKind::TraceParse, "trajectory and steps disagree in length");
        return trace;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorKind::TraceParse, e.what());
    }
}

auto read_trace_log(const std::filesystem::path& path) -> std::vector<TraceRecord>
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("cannot open trace log {}", path.string()));

    auto traces = std::vector<TraceRecord> {};
    auto line_no = 0;
    for (auto line = std::string {}; std::getline(in, line);)
    {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        auto const json = nlohmann::json::parse(line, nullptr, false);
        if (json.is_discarded())
            throw Error(ErrorKind::TraceParse, fmt::format("{}:{}: not valid JSON", path.string(), line_no));
        try
        {
            traces.push_back(trace_from_json(json));
        }
        catch (const Error& e)
        {
            throw Error(ErrorKind::TraceParse, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
    }
    return traces;
}

void write_trace_log(const std::filesystem::path& path, const std::vector<TraceRecord>& traces, bool include_timings)
{
    auto out = std::ofstream(path, std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, fmt::format("cannot write trace log {}", path.string()));
    for (auto const& trace: traces)
        out << to_json(trace, include_timings).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

} // namespace compagent
