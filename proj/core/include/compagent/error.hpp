// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace compagent
{

enum class ErrorKind
{
    // policy
    MalformedDocument,
    DuplicateCode,
    EmptyRuleList,
    UnknownCategory,
    // llm client
    Network,
    ProviderRejected,
    ScriptExhausted,
    DuplicateScriptKey,
    // tools
    DuplicateTool,
    UnknownTool,
    ArgsSchema,
    InvokerFailure,
    FixtureMiss,
    FixtureParse,
    InvalidToolOutput,
    RepeatLimit,
    // planner / verifier / routing
    ActionParse,
    InvalidToolAction,
    StepMismatch,
    AssessmentParse,
    RoutingParse,
    // harness / cli
    ManifestParse,
    DuplicateSampleId,
    TraceParse,
    Config,
    Io,
};

auto to_string(ErrorKind kind) -> std::string_view;
auto error_kind_from_string(std::string_view name) -> std::optional<ErrorKind>;

/// Transport-level failures are the only retryable kind.
constexpr auto is_retryable(ErrorKind kind) noexcept -> bool
{
    return kind == ErrorKind::Network;
}

class Error: public std::runtime_error
{
  public:
    Error(ErrorKind kind, std::string message):
        std::runtime_error(std::move(message)), _kind(kind)
    {
    }

    [[nodiscard]] auto kind() const noexcept -> ErrorKind { return _kind; }
    [[nodiscard]] auto retryable() const noexcept -> bool { return is_retryable(_kind); }

  private:
    ErrorKind _kind;
};

} // namespace compagent
