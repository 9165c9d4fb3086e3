// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/image.hpp>
#include <compagent/policy.hpp>
#include <compagent/tool_suite.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace compagent
{

/// Recorded outcome of one tool invocation. Exactly one of output/error is set.
struct Evidence
{
    std::size_t step_index = 0;
    std::string tool_name;
    ToolArgs args = nlohmann::json::object();
    std::optional<ToolOutput> output;
    std::optional<ToolError> error;
    std::int64_t elapsed_ms = 0;

    static auto from_execution(std::size_t step, ToolArgs args, ToolExecution execution) -> Evidence;
};

/// Planner state: the image and policy are fixed for the run, evidence is
/// append-only and `step` counts the entries appended so far.
struct VerificationState
{
    ImageRef image;
    std::shared_ptr<const Policy> policy;
    std::vector<Evidence> evidence;
    std::size_t step = 0;
};

/// Appends `e`. Throws Error{StepMismatch} unless e.step_index == s.step.
auto update_state(VerificationState state, Evidence e) -> VerificationState;

auto to_json(const Evidence& evidence, bool include_timing) -> nlohmann::json;
auto evidence_from_json(const nlohmann::json& json) -> Evidence;

/// Chronological compact-JSON lines, one per entry, dropping the oldest
/// entries first once `char_budget` would be exceeded.
auto render_evidence(std::span<const Evidence> evidence, std::size_t char_budget) -> std::string;

} // namespace compagent
