// SPDX-License-Identifier: Apache-2.0
#include <compagent/prompts.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace compagent::prompts
{

namespace
{

auto arg_type_name(ArgType type) -> std::string_view
{
    switch (type)
    {
        case ArgType::String: return "string";
        case ArgType::Integer: return "integer";
        case ArgType::Number: return "number";
        case ArgType::Boolean: return "boolean";
    }
    return "string";
}

constexpr auto planner_template = R"(You are a helpful assistant who provides a safety assessment for the content provided by the user.
Use the provided tools and the image to determine compliance or violation against our safety policy by reviewing the following policy categories.

<policy>{policy}</policy>

<tools>
{tools}</tools>

<instruction>
{summary_first}- Use the tools to fetch required metadata for the image.
- Call one tool per reply. Do not repeat a call whose result is already in the evidence.
{steps}
To call a tool, reply with a single line:
CALL <tool_name> {"argument": value}
(omit the JSON object when the tool takes no arguments).
When the evidence is sufficient, stop calling tools. To provide your assessment use the following json template:
{
    "rating": str<"Unsafe"|"Safe">,
    "category": str<{choices}>,
    "rationale": str,
}
</instruction>)";

constexpr auto verifier_template = R"(You are a compliance verification agent. Provide a safety assessment of the attached image using the image itself, the evidence collected by analysis tools and the safety policy below. Tool outputs carry confidence scores and tools can be wrong or fail; cross-check them against each other and against the image.

<policy>{policy}</policy>

<instruction>
Assessment Steps:
{steps}

Respond ONLY with a JSON object of this form:
{"rating": "Unsafe"|"Safe", "category": {choices}, "rationale": "..."}
</instruction>)";

constexpr auto routing_template = R"(You are an expert image safety analyst tasked with routing images to the appropriate assessment system. Your job is to carefully analyze the image and determine which cluster of safety tools should process this image, regardless of whether it contains safety violations.

First, describe what you see in the image in detail (10-30 words).

Then, classify this image into EXACTLY ONE of these assessment clusters, based on what type of analysis would be most appropriate - even if the image is completely safe:

Cluster 1: VISUAL OBJECT DETECTION
For images featuring:
- Objects that could be weapons or dangerous items (even if used safely)
- Products like beverages, smoking items, or medicine (even if legal use)
- Animals (to check for proper treatment)
- Natural disaster scenes or emergency situations (even if educational)

Cluster 2: HUMAN CONTENT ANALYSIS
For images featuring:
- People's bodies or physical appearance (even if fully clothed)
- Physical contact between individuals (even if appropriate)
- Medical contexts or physical conditions (even if educational)
- Sports, exercise, or physical activities (even if safe)
- People in distress or emotional states (even if acted)

Cluster 3: TEXT AND SYMBOL ANALYSIS
For images featuring:
- Text in any language (even if benign)
- Symbols, signs, or iconography (even if positive)
- Screenshots of conversations or social media (even if harmless)
- Logos, brands, or trademarks (even if legitimate)
- Hand gestures or signals (even if friendly)

Cluster 4: CONTEXTUAL ASSESSMENT
For images requiring:
- Understanding of historical or cultural context
- Differentiation between educational and promotional content
- Consideration of artistic or creative expression
- Interpretation of news reporting or documentation
- Evaluation of intent rather than just visual elements

Cluster 5: NO SPECIALIZED ASSESSMENT NEEDED
For images with:
- Simple landscapes or nature scenes
- Basic objects with no safety implications
- Abstract patterns or designs
- Other content requiring no specialized analysis

Important: Select the SINGLE most appropriate cluster based on what type of analysis tools would be most relevant, even if the image is completely safe and compliant.

Respond ONLY in this exact format:
<description>your detailed image description</description>
<cluster>Cluster X</cluster>
<reasoning>Brief explanation of why this type of analysis is most appropriate for this image, regardless of whether any violations exist.</reasoning>)";

constexpr auto assessment_template = R"(Provide a safety assessment based on the following information provided by the user: {inputs}.
Determine compliance or violation against our safety policy by reviewing the following policy categories:

{policy}
Assessment Steps:
{steps}

Respond ONLY in this exact format:
<rating>"Unsafe"|"Safe"</rating>
<category>{choices}</category>
<rationale>Your rationale for giving the rating and classifying into that category</rationale>)";

} // namespace

auto category_choices(const Policy& policy) -> std::string
{
    auto out = std::string {};
    for (auto const& c: policy.categories)
        out += fmt::format("\"{}: {}\"|", c.code, c.title);
    out += fmt::format("\"{}\"", policy.na_label);
    return out;
}

auto assessment_steps(const Policy& policy) -> std::string
{
    return fmt::format(
        "1. Select a safety \"rating\". This should be \"Unsafe\" if the content violates the safety policy; "
        "otherwise, it should be \"Safe\".\n"
        "2. Assign a policy \"category\". If none of the policy categories are applicable, select \"{}\".\n"
        "3. Provide a \"rationale\". Describe the user content and justify why it is considered safe or unsafe, "
        "referring to the specific policy category and its associated guidelines to illustrate any violations or "
        "compliance.",
        policy.na_label);
}

auto render_tool_descriptions(std::span<const ToolDescriptor> tools) -> std::string
{
    auto out = std::string {};
    for (auto const& tool: tools)
    {
        out += fmt::format("- {} ({}) [{}]: {}\n", tool.name, tool.display_name, to_string(tool.category), tool.description);
        if (tool.args_schema.empty())
            out += "  arguments: none\n";
        for (auto const& arg: tool.args_schema)
            out += fmt::format("  argument {} ({}, {}): {}\n", arg.name, arg_type_name(arg.type),
                               arg.required ? "required" : "optional", arg.description);
    }
    return out;
}

auto planner_system(const Policy& policy, std::span<const ToolDescriptor> tools) -> std::string
{
    auto const has_summary = std::any_of(tools.begin(), tools.end(),
                                         [](auto const& t) { return t.category == ToolCategory::Summarization; });
    auto steps = std::string {};
    auto const numbered = assessment_steps(policy);
    // the numbered steps become bullet points in the planner instruction block
    for (auto pos = std::size_t { 0 }; pos < numbered.size();)
    {
        auto const end = std::min(numbered.find('\n', pos), numbered.size());
        auto const line = std::string_view(numbered).substr(pos, end - pos);
        steps += fmt::format("- {}\n", line.substr(line.find(' ') + 1));
        pos = end + 1;
    }
    steps.pop_back();

    auto text = std::string(planner_template);
    text = detail::fill_slot(std::move(text), "summary_first",
                             has_summary ? "- Call the image summary tools first to get an overview of the image and "
                                           "then call specialized tools.\n"
                                         : "");
    text = detail::fill_slot(std::move(text), "steps", steps);
    text = detail::fill_slot(std::move(text), "choices", category_choices(policy));
    text = detail::fill_slot(std::move(text), "tools", render_tool_descriptions(tools));
    text = detail::fill_slot(std::move(text), "policy", render_policy_text(policy));
    return text;
}

auto planner_user(std::string_view evidence_block, std::span<const std::string> notes) -> std::string
{
    auto out = fmt::format("<evidence>\n{}</evidence>\n", evidence_block.ends_with('\n') ? std::string(evidence_block) : std::string(evidence_block) + "\n");
    if (!notes.empty())
    {
        out += "<notes>\n";
        for (auto const& note: notes)
            out += fmt::format("- {}\n", note);
        out += "</notes>\n";
    }
    out += "Decide the next action: call exactly one tool, or provide the final assessment JSON.";
    return out;
}

auto verifier_system(const Policy& policy) -> std::string
{
    auto text = std::string(verifier_template);
    text = detail::fill_slot(std::move(text), "steps", assessment_steps(policy));
    text = detail::fill_slot(std::move(text), "choices", category_choices(policy));
    text = detail::fill_slot(std::move(text), "policy", render_policy_text(policy));
    return text;
}

auto verifier_user(std::string_view evidence_block) -> std::string
{
    auto block = std::string(evidence_block);
    if (!block.ends_with('\n'))
        block += '\n';
    return fmt::format("<evidence>\n{}</evidence>\nAssess the attached image against the policy.", block);
}

auto routing_system() -> std::string
{
    return routing_template;
}

auto policy_assessment_system(const Policy& policy, bool with_metadata) -> std::string
{
    auto text = std::string(assessment_template);
    text = detail::fill_slot(std::move(text), "inputs",
                             with_metadata ? "image metadata, assessment category assigned to the image to extract "
                                             "image metadata and the image"
                                           : "the image");
    text = detail::fill_slot(std::move(text), "steps", assessment_steps(policy));
    text = detail::fill_slot(std::move(text), "choices", category_choices(policy));
    text = detail::fill_slot(std::move(text), "policy", render_policy_text(policy));
    return text;
}

auto policy_assessment_user(std::string_view image_metadata, std::string_view assessment_category) -> std::string
{
    return fmt::format("<image_metadata>\n{}\n</image_metadata>\n<assesment_category>\n{}\n</assesment_category>",
                       image_metadata, assessment_category);
}

} // namespace compagent::prompts
