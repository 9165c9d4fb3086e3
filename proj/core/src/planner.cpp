// SPDX-License-Identifier: Apache-2.0
#include <compagent/planner.hpp>
#include <compagent/prompts.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <chrono>
#include <sstream>

namespace compagent
{

namespace
{

using Clock = std::chrono::steady_clock;

auto ms_since(Clock::time_point start) -> std::int64_t
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

/// Number of trailing evidence entries that repeat `call` exactly.
auto trailing_repeats(std::span<const Evidence> evidence, const ToolCall& call) -> int
{
    auto count = 0;
    for (auto it = evidence.rbegin(); it != evidence.rend(); ++it, ++count)
        if (it->tool_name != call.tool_name || it->args != call.args)
            break;
    return count;
}

auto tool_names(std::span<const ToolDescriptor> tools) -> std::string
{
    auto out = std::string {};
    for (auto const& tool: tools)
        out += (out.empty() ? "" : ", ") + tool.name;
    return out;
}

} // namespace

void RunConfig::validate() const
{
    if (max_steps < 1)
        throw Error(ErrorKind::Config, "max_steps must be at least 1");
    if (repeat_call_limit < 1)
        throw Error(ErrorKind::Config, "repeat_call_limit must be at least 1");
    if (decoding.temperature < 0.0 || decoding.max_tokens < 1)
        throw Error(ErrorKind::Config, "decoding needs temperature >= 0 and max_tokens >= 1");
}

auto parse_action(std::string_view text, std::span<const ToolDescriptor> tools, const Policy& policy) -> ParsedAction
{
    using Status = ParsedAction::Status;

    auto stream = std::istringstream(std::string(text));
    for (auto line = std::string {}; std::getline(stream, line);)
    {
        auto const trimmed = detail::strip(line, "`*>");
        if (!detail::istarts_with(trimmed, "CALL ") && !detail::istarts_with(trimmed, "CALL\t"))
            continue;

        auto rest = detail::trim(trimmed.substr(5));
        auto const name_end = std::min(rest.find_first_of(" \t{"), rest.size());
        auto const name = std::string(rest.substr(0, name_end));
        auto const args_text = detail::trim(rest.substr(name_end));

        auto args = nlohmann::json::object();
        if (!args_text.empty())
        {
            args = nlohmann::json::parse(args_text, nullptr, false);
            if (args.is_discarded() || !args.is_object())
                return { Status::Unparseable, std::nullopt, fmt::format("arguments for '{}' are not a JSON object", name) };
        }
        auto const known = std::any_of(tools.begin(), tools.end(), [&](auto const& t) { return t.name == name; });
        if (!known)
            return { Status::InvalidTool, std::nullopt, name };
        return { Status::Ok, Action { ToolCall { name, std::move(args) } }, {} };
    }

    try
    {
        if (auto assessment = parse_json_assessment(text, policy))
            return { Status::Ok, Action { Conclude { std::move(assessment) } }, {} };
    }
    catch (const Error& e)
    {
        return { Status::Unparseable, std::nullopt, e.what() };
    }
    return { Status::Unparseable, std::nullopt, "no CALL line and no assessment JSON object" };
}

auto build_planner_request(const VerificationState& state, std::span<const ToolDescriptor> tools,
                           const RunConfig& config, std::span<const std::string> notes) -> ChatRequest
{
    return ChatRequest {
        .system_text = prompts::planner_system(*state.policy, tools),
        .user_text = prompts::planner_user(render_evidence(state.evidence, config.evidence_char_budget), notes),
        .image = config.attach_image_to_planner ? std::optional(state.image) : std::nullopt,
        .model_id = config.planner_model_id,
        .decoding = config.decoding,
        .session_id = state.image.id,
    };
}

auto plan_step(const VerificationState& state, std::span<const ToolDescriptor> tools, ChatClient& llm,
               const RunConfig& config) -> PlanResult
{
    using Status = ParsedAction::Status;

    auto raw_texts = std::vector<std::string> {};
    auto notes = std::vector<std::string> {};
    for (auto attempt = 0; attempt < 2; ++attempt)
    {
        raw_texts.push_back(llm.complete(build_planner_request(state, tools, config, notes)).text);
        auto parsed = parse_action(raw_texts.back(), tools, *state.policy);
        if (parsed.status == Status::Ok)
            return { std::move(*parsed.action), std::move(raw_texts) };

        if (attempt == 1)
        {
            auto const kind = parsed.status == Status::InvalidTool ? ErrorKind::InvalidToolAction : ErrorKind::ActionParse;
            throw ModelOutputError(kind, fmt::format("planner output unusable after reprompt: {}", parsed.detail),
                                   std::move(raw_texts));
        }
        if (parsed.status == Status::InvalidTool)
            notes.push_back(fmt::format("Tool '{}' is not available. Choose one of: {}.", parsed.detail, tool_names(tools)));
        else
            notes.push_back(fmt::format("Your previous reply contained no valid action ({}). Reply with a single "
                                        "CALL line or the final assessment JSON.",
                                        parsed.detail));
    }
    throw Error(ErrorKind::ActionParse, "unreachable");
}

auto run_verification(const ImageRef& image, std::shared_ptr<const Policy> policy, const ToolRegistry& registry,
                      ChatClient& llm, const RunConfig& config) -> TraceRecord
{
    config.validate();
    if (registry.size() == 0)
        throw Error(ErrorKind::Config, "tool registry is empty");

    auto const started = Clock::now();
    auto trace = TraceRecord {};
    trace.image_id = image.id;
    trace.policy_id = policy->id;
    trace.pipeline = "agentic";

    auto state = VerificationState { image, policy, {}, 0 };
    auto const tools = registry.list_descriptors();
    auto const verifier = VerifierOptions {
        .model_id = config.verifier_model_id,
        .decoding = config.decoding,
        .attach_image = true,
        .evidence_char_budget = config.evidence_char_budget,
    };

    auto const fail = [&](const Error& e) {
        trace.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
        trace.timings.total_ms = ms_since(started);
        return RunFailure(e.kind(), e.what(), trace);
    };
    auto const finish = [&](Assessment assessment) {
        trace.category_display = policy->display(assessment.category);
        trace.assessment = std::move(assessment);
        trace.timings.total_ms = ms_since(started);
        return trace;
    };
    auto const conclude = [&] {
        auto const verify_started = Clock::now();
        try
        {
            auto outcome = assess(state, llm, verifier);
            trace.raw_model_texts.insert(trace.raw_model_texts.end(), outcome.raw_texts.begin(), outcome.raw_texts.end());
            trace.timings.verification_ms = ms_since(verify_started);
            return finish(std::move(outcome.assessment));
        }
        catch (const ModelOutputError& e)
        {
            trace.raw_model_texts.insert(trace.raw_model_texts.end(), e.raw_texts().begin(), e.raw_texts().end());
            throw fail(e);
        }
        catch (const Error& e)
        {
            throw fail(e);
        }
    };

    for (auto iteration = 0; iteration < config.max_steps; ++iteration)
    {
        auto const plan_started = Clock::now();
        auto plan = PlanResult {};
        try
        {
            plan = plan_step(state, tools, llm, config);
        }
        catch (const ModelOutputError& e)
        {
            trace.raw_model_texts.insert(trace.raw_model_texts.end(), e.raw_texts().begin(), e.raw_texts().end());
            throw fail(e);
        }
        catch (const Error& e)
        {
            throw fail(e);
        }
        trace.timings.planning_ms += ms_since(plan_started);
        trace.raw_model_texts.insert(trace.raw_model_texts.end(), plan.raw_texts.begin(), plan.raw_texts.end());

        if (auto* done = std::get_if<Conclude>(&plan.action))
        {
            if (config.fused_mode && done->assessment)
                return finish(std::move(*done->assessment));
            return conclude();
        }

        auto& call = std::get<ToolCall>(plan.action);
        auto execution = ToolExecution {};
        if (trailing_repeats(state.evidence, call) >= config.repeat_call_limit)
            execution = ToolExecution {
                .tool_name = call.tool_name,
                .output = std::nullopt,
                .error = ToolError { ErrorKind::RepeatLimit,
                                     fmt::format("identical call to '{}' already made {} times in a row; not executed, "
                                                 "choose a different action",
                                                 call.tool_name, config.repeat_call_limit) },
                .elapsed_ms = 0,
            };
        else
            execution = registry.execute_tool(call.tool_name, image, call.args);

        trace.timings.tools_ms += execution.elapsed_ms;
        auto evidence = Evidence::from_execution(state.step, std::move(call.args), std::move(execution));
        trace.trajectory.push_back(evidence.tool_name);
        trace.steps.push_back({ plan.raw_texts.back(), evidence });
        state = update_state(std::move(state), std::move(evidence));
    }

    trace.truncated = true;
    return conclude();
}

} // namespace compagent
