// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/error.hpp>
#include <compagent/image.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace compagent
{

enum class ToolCategory
{
    Summarization,
    ContentDetection,
    SpecializedCompliance,
};

auto to_string(ToolCategory category) -> std::string_view;
auto parse_tool_category(std::string_view name) -> std::optional<ToolCategory>;
auto all_tool_categories() -> std::vector<ToolCategory>;

enum class ArgType
{
    String,
    Integer,
    Number,
    Boolean,
};

struct ArgSpec
{
    std::string name;
    ArgType type = ArgType::String;
    bool required = false;
    std::string description;
};

struct ToolDescriptor
{
    std::string name;         // identifier the planner calls, e.g. "object_detection"
    std::string display_name; // e.g. "Object Detection"
    std::string description;  // capabilities, usage guidance, limitations
    std::vector<ArgSpec> args_schema;
    ToolCategory category = ToolCategory::ContentDetection;
};

/// Normalized rectangle, all coordinates in [0,1].
struct BoundingBox
{
    double left = 0;
    double top = 0;
    double width = 0;
    double height = 0;

    auto operator==(const BoundingBox&) const -> bool = default;
};

struct Detection
{
    std::string label;
    double score = 0;
    std::optional<BoundingBox> bbox;
    std::optional<std::string> text;

    auto operator==(const Detection&) const -> bool = default;
};

struct ModerationLabel
{
    std::string label;
    double score = 0;
    std::optional<std::string> severity;

    auto operator==(const ModerationLabel&) const -> bool = default;
};

/// Standardized result every tool emits.
struct ToolOutput
{
    std::string tool_name;
    std::vector<Detection> detections;
    std::optional<std::string> summary;
    std::vector<ModerationLabel> moderation_labels;
    std::map<std::string, std::string> extra;

    [[nodiscard]] auto empty() const -> bool
    {
        return detections.empty() && !summary && moderation_labels.empty() && extra.empty();
    }

    auto operator==(const ToolOutput&) const -> bool = default;
};

auto to_json(const ToolOutput& output) -> nlohmann::json;

/// Parses a serialized ToolOutput and normalizes its scores: values in
/// [0,1] pass through, values in (1,100] are read as percentages.
/// Throws Error{InvalidToolOutput}.
auto tool_output_from_json(const nlohmann::json& json, std::string_view expected_tool) -> ToolOutput;

struct ToolError
{
    ErrorKind kind = ErrorKind::InvokerFailure;
    std::string message;

    auto operator==(const ToolError&) const -> bool = default;
};

/// Result of one execute_tool call: exactly one of output/error is set.
struct ToolExecution
{
    std::string tool_name;
    std::optional<ToolOutput> output;
    std::optional<ToolError> error;
    std::int64_t elapsed_ms = 0;

    [[nodiscard]] auto ok() const -> bool { return output.has_value(); }
};

using ToolArgs = nlohmann::json; // object

/// Executes one tool on one image; failures are reported by throwing.
using ToolInvoker = std::function<ToolOutput(const ToolDescriptor&, const ImageRef&, const ToolArgs&)>;

class ToolRegistry
{
  public:
    /// Throws Error{DuplicateTool}.
    void register_tool(ToolDescriptor descriptor, ToolInvoker invoker);

    /// Disables a tool (by name or display name) or a whole category.
    /// Throws Error{Config} for names that match nothing.
    void disable(std::string_view tool_or_category);

    [[nodiscard]] auto is_enabled(std::string_view name) const -> bool;
    [[nodiscard]] auto list_descriptors() const -> std::vector<ToolDescriptor>;
    [[nodiscard]] auto find(std::string_view name) const -> const ToolDescriptor*; // enabled only
    [[nodiscard]] auto contains(std::string_view name) const -> bool;              // regardless of state
    [[nodiscard]] auto disabled_sets() const -> const std::set<std::string>& { return _disabled; }
    [[nodiscard]] auto size() const -> std::size_t { return _entries.size(); }

    /// Never throws for tool-level failures: unknown/disabled tools, schema
    /// violations and invoker failures all come back as ToolExecution::error.
    [[nodiscard]] auto execute_tool(std::string_view name, const ImageRef& image, const ToolArgs& args) const
        -> ToolExecution;

  private:
    struct Entry
    {
        ToolDescriptor descriptor;
        ToolInvoker invoker;
    };

    [[nodiscard]] auto entry_enabled(const Entry& entry) const -> bool;
    [[nodiscard]] auto lookup(std::string_view name) const -> const Entry*;

    std::vector<Entry> _entries; // registration order
    std::set<std::string> _disabled;
};

/// Checks `args` against the schema; returns a message describing the first
/// violation, or nothing.
auto validate_args(const ToolDescriptor& descriptor, const ToolArgs& args) -> std::optional<std::string>;

/// The eight bundled tools: image_summary, face_detection, object_detection,
/// text_detection, content_moderation, llavaguard_classification, safe_clip,
/// icm_assistant.
auto bundled_descriptors() -> std::vector<ToolDescriptor>;

/// Reads `<store_root>/<tool>/<image id>.json`. A file of the form
/// {"error": "..."} simulates a failing service.
/// Throws Error{FixtureMiss | FixtureParse | InvokerFailure}.
auto fixture_invoker(std::filesystem::path store_root) -> ToolInvoker;

struct RemoteToolConfig
{
    std::string tool_name;
    std::string endpoint;
    std::string auth_env;
    std::chrono::milliseconds timeout { 30'000 };
};

/// Generic JSON-over-HTTP adapter. POSTs
///   {"tool", "image": {"id", "location", "media_type", "bytes_base64"?}, "args"}
/// and expects a serialized ToolOutput back.
auto remote_invoker(RemoteToolConfig config) -> ToolInvoker;

/// Registry with the bundled descriptors, all backed by `invoker`.
auto make_bundled_registry(const ToolInvoker& invoker) -> ToolRegistry;

} // namespace compagent
