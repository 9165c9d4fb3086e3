// SPDX-License-Identifier: Apache-2.0
#include <compagent/error.hpp>
#include <compagent/state.hpp>

#include <fmt/format.h>

#include <deque>

namespace compagent
{

auto Evidence::from_execution(std::size_t step, ToolArgs args, ToolExecution execution) -> Evidence
{
    return Evidence {
        .step_index = step,
        .tool_name = std::move(execution.tool_name),
        .args = args.is_null() ? nlohmann::json::object() : std::move(args),
        .output = std::move(execution.output),
        .error = std::move(execution.error),
        .elapsed_ms = execution.elapsed_ms,
    };
}

auto update_state(VerificationState state, Evidence e) -> VerificationState
{
    if (e.step_index != state.step)
        throw Error(ErrorKind::StepMismatch,
                    fmt::format("evidence for step {} cannot be appended at step {}", e.step_index, state.step));
    state.evidence.push_back(std::move(e));
    ++state.step;
    return state;
}

auto to_json(const Evidence& evidence, bool include_timing) -> nlohmann::json
{
    auto json = nlohmann::json {
        { "step", evidence.step_index },
        { "tool", evidence.tool_name },
        { "args", evidence.args },
    };
    if (evidence.output)
    {
        auto output = to_json(*evidence.output);
        output.erase("tool_name");
        json["output"] = std::move(output);
    }
    if (evidence.error)
        json["error"] = { { "kind", to_string(evidence.error->kind) }, { "message", evidence.error->message } };
    if (include_timing)
        json["elapsed_ms"] = evidence.elapsed_ms;
    return json;
}

auto evidence_from_json(const nlohmann::json& json) -> Evidence
{
    if (!json.is_object() || !json.contains("step") || !json.contains("tool"))
        throw Error(ErrorKind::TraceParse, "evidence entry needs 'step' and 'tool'");

    auto evidence = Evidence {};
    evidence.step_index = json.at("step").get<std::size_t>();
    evidence.tool_name = json.at("tool").get<std::string>();
    evidence.args = json.value("args", nlohmann::json::object());
    evidence.elapsed_ms = json.value("elapsed_ms", std::int64_t { 0 });
    if (json.contains("output"))
        evidence.output = tool_output_from_json(json.at("output"), evidence.tool_name);
    if (json.contains("error"))
    {
        auto const& error = json.at("error");
        evidence.error = ToolError {
            error_kind_from_string(error.value("kind", std::string {})).value_or(ErrorKind::InvokerFailure),
            error.value("message", std::string {}),
        };
    }
    if (evidence.output.has_value() == evidence.error.has_value())
        throw Error(ErrorKind::TraceParse, fmt::format("evidence step {} needs exactly one of output/error", evidence.step_index));
    return evidence;
}

auto render_evidence(std::span<const Evidence> evidence, std::size_t char_budget) -> std::string
{
    if (evidence.empty())
        return "none yet";

    auto kept = std::deque<std::string> {};
    auto used = std::size_t { 0 };
    for (auto it = evidence.rbegin(); it != evidence.rend(); ++it)
    {
        auto line = to_json(*it, false).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        if (used + line.size() + 1 > char_budget && !kept.empty())
            break;
        used += line.size() + 1;
        kept.push_front(std::move(line));
    }

    auto out = std::string {};
    if (auto const omitted = evidence.size() - kept.size(); omitted > 0)
        out += fmt::format("[{} earlier evidence entries omitted]\n", omitted);
    for (auto const& line: kept)
    {
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace compagent
