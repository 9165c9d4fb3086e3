// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/assessment.hpp>
#include <compagent/llm_client.hpp>
#include <compagent/state.hpp>
#include <compagent/tool_suite.hpp>
#include <compagent/trace.hpp>
#include <compagent/verifier.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace compagent
{

struct RunConfig
{
    int max_steps = 10;
    int repeat_call_limit = 2;
    std::string planner_model_id = "planner";
    std::string verifier_model_id = "verifier";
    bool fused_mode = false;
    bool attach_image_to_planner = true;
    std::size_t evidence_char_budget = 20'000;
    Decoding decoding {};

    /// Throws Error{Config}.
    void validate() const;
};

struct ToolCall
{
    std::string tool_name;
    ToolArgs args = nlohmann::json::object();

    auto operator==(const ToolCall&) const -> bool = default;
};

/// Terminal action. `assessment` is the planner's own verdict, used only
/// in fused mode.
struct Conclude
{
    std::optional<Assessment> assessment;
};

using Action = std::variant<ToolCall, Conclude>;

/// Outcome of parsing a single planner reply.
struct ParsedAction
{
    enum class Status
    {
        Ok,
        Unparseable,
        InvalidTool,
    };

    Status status = Status::Unparseable;
    std::optional<Action> action;
    std::string detail; // why parsing failed, or the offending tool name
};

/// Recognizes a `CALL <tool_name> {json args}` line, else an assessment
/// JSON object (Conclude). Tool names must appear in `tools`.
auto parse_action(std::string_view text, std::span<const ToolDescriptor> tools, const Policy& policy) -> ParsedAction;

struct PlanResult
{
    Action action;
    std::vector<std::string> raw_texts; // model replies, reprompt included
};

auto build_planner_request(const VerificationState& state, std::span<const ToolDescriptor> tools,
                           const RunConfig& config, std::span<const std::string> notes) -> ChatRequest;

/// One planning decision with at most one reprompt. Throws
/// ModelOutputError{ActionParse | InvalidToolAction}.
auto plan_step(const VerificationState& state, std::span<const ToolDescriptor> tools, ChatClient& llm,
               const RunConfig& config) -> PlanResult;

/// Plan, execute, update until Conclude or `max_steps` evidence entries,
/// then hand the state to the verifier. Throws RunFailure with the partial
/// trace when no assessment can be produced.
auto run_verification(const ImageRef& image, std::shared_ptr<const Policy> policy, const ToolRegistry& registry,
                      ChatClient& llm, const RunConfig& config) -> TraceRecord;

} // namespace compagent
