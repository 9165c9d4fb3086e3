// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/policy.hpp>
#include <compagent/tool_suite.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace compagent::prompts
{

/// "\"O1: ...\"|...|\"NA: None applying\""
auto category_choices(const Policy& policy) -> std::string;

/// The three numbered rating/category/rationale steps.
auto assessment_steps(const Policy& policy) -> std::string;

/// One block per tool: name, display name, category, description, args.
auto render_tool_descriptions(std::span<const ToolDescriptor> tools) -> std::string;

// Planning agent
auto planner_system(const Policy& policy, std::span<const ToolDescriptor> tools) -> std::string;
auto planner_user(std::string_view evidence_block, std::span<const std::string> notes) -> std::string;

// Compliance verification agent
auto verifier_system(const Policy& policy) -> std::string;
auto verifier_user(std::string_view evidence_block) -> std::string;
inline constexpr std::string_view verifier_correction =
    "Your previous reply could not be parsed. Reply again with only the JSON object described in the "
    "instructions, using exactly the keys \"rating\", \"category\" and \"rationale\".";

// Baselines
auto routing_system() -> std::string;
inline constexpr std::string_view routing_user = "Route the attached image.";

/// Policy-based assessment prompt. The routing baseline fills the
/// image_metadata and assesment_category slots; zero-shot omits them.
auto policy_assessment_system(const Policy& policy, bool with_metadata) -> std::string;
auto policy_assessment_user(std::string_view image_metadata, std::string_view assessment_category) -> std::string;
inline constexpr std::string_view zero_shot_user = "Assess the attached image.";

} // namespace compagent::prompts
