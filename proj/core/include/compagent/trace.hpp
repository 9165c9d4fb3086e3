// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/assessment.hpp>
#include <compagent/error.hpp>
#include <compagent/state.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace compagent
{

/// Routing baseline decision; `cluster` is always within 1..5.
struct RouteDecision
{
    std::string description;
    int cluster = 5;
    std::string reasoning;

    auto operator==(const RouteDecision&) const -> bool = default;
};

struct TraceStep
{
    std::string action_raw; // model text that produced this step's action
    Evidence evidence;
};

struct Timings
{
    std::int64_t total_ms = 0;
    std::int64_t planning_ms = 0;
    std::int64_t tools_ms = 0;
    std::int64_t verification_ms = 0;
};

struct TraceRecord
{
    std::string image_id;
    std::string policy_id;
    std::string pipeline; // agentic | routing | zero_shot
    std::vector<std::string> trajectory;
    std::vector<TraceStep> steps;
    std::optional<Assessment> assessment;
    std::string category_display; // assessment category as "<code>: <title>"
    bool truncated = false;
    std::optional<RouteDecision> route;
    std::vector<std::string> raw_model_texts;
    std::optional<std::string> error; // "<kind>: <message>" for failed runs
    Timings timings {};
};

/// One JSON object; keys are emitted in sorted order so equal records dump
/// to identical bytes. Timing fields are dropped unless `include_timings`.
auto to_json(const TraceRecord& trace, bool include_timings) -> nlohmann::json;

/// Throws Error{TraceParse}.
auto trace_from_json(const nlohmann::json& json) -> TraceRecord;

/// Line-delimited trace log. Errors name the offending line.
auto read_trace_log(const std::filesystem::path& path) -> std::vector<TraceRecord>;
void write_trace_log(const std::filesystem::path& path, const std::vector<TraceRecord>& traces, bool include_timings);

/// Unparseable model output after the allowed reprompt; keeps every raw
/// text the model produced for the failed exchange.
class ModelOutputError: public Error
{
  public:
    ModelOutputError(ErrorKind kind, std::string message, std::vector<std::string> raw_texts):
        Error(kind, std::move(message)), _raw_texts(std::move(raw_texts))
    {
    }

    [[nodiscard]] auto raw_texts() const -> const std::vector<std::string>& { return _raw_texts; }

  private:
    std::vector<std::string> _raw_texts;
};

/// A run that could not produce an assessment; carries the partial trace.
class RunFailure: public Error
{
  public:
    RunFailure(ErrorKind kind, std::string message, TraceRecord partial):
        Error(kind, std::move(message)), _partial(std::move(partial))
    {
    }

    [[nodiscard]] auto partial_trace() const -> const TraceRecord& { return _partial; }

  private:
    TraceRecord _partial;
};

} // namespace compagent
