// SPDX-License-Identifier: Apache-2.0
#include <compagent/error.hpp>

namespace compagent
{

auto to_string(ErrorKind kind) -> std::string_view
{
    switch (kind)
    {
        case ErrorKind::MalformedDocument: return "malformed_document";
        case ErrorKind::DuplicateCode: return "duplicate_code";
        case ErrorKind::EmptyRuleList: return "empty_rule_list";
        case ErrorKind::UnknownCategory: return "unknown_category";
        case ErrorKind::Network: return "network";
        case ErrorKind::ProviderRejected: return "provider_rejected";
        case ErrorKind::ScriptExhausted: return "script_exhausted";
        case ErrorKind::DuplicateScriptKey: return "duplicate_script_key";
        case ErrorKind::DuplicateTool: return "duplicate_tool";
        case ErrorKind::UnknownTool: return "unknown_tool";
        case ErrorKind::ArgsSchema: return "args_schema";
        case ErrorKind::InvokerFailure: return "invoker_failure";
        case ErrorKind::FixtureMiss: return "fixture_miss";
        case ErrorKind::FixtureParse: return "fixture_parse";
        case ErrorKind::InvalidToolOutput: return "invalid_tool_output";
        case ErrorKind::RepeatLimit: return "repeat_limit";
        case ErrorKind::ActionParse: return "action_parse";
        case ErrorKind::InvalidToolAction: return "invalid_tool_action";
        case ErrorKind::StepMismatch: return "step_mismatch";
        case ErrorKind::AssessmentParse: return "assessment_parse";
        case ErrorKind::RoutingParse: return "routing_parse";
        case ErrorKind::ManifestParse: return "manifest_parse";
        case ErrorKind::DuplicateSampleId: return "duplicate_sample_id";
        case ErrorKind::TraceParse: return "trace_parse";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

auto error_kind_from_string(std::string_view name) -> std::optional<ErrorKind>
{
    for (auto k = 0; k <= static_cast<int>(ErrorKind::Io); ++k)
        if (to_string(static_cast<ErrorKind>(k)) == name)
            return static_cast<ErrorKind>(k);
    return std::nullopt;
}

} // namespace compagent
