// SPDX-License-Identifier: Apache-2.0
#include <compagent/tool_suite.hpp>

#include "encoding.hpp"
#include "http.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace compagent
{

auto to_string(ToolCategory category) -> std::string_view
{
    switch (category)
    {
        case ToolCategory::Summarization: return "summarization";
        case ToolCategory::ContentDetection: return "content_detection";
        case ToolCategory::SpecializedCompliance: return "specialized_compliance";
    }
    return "unknown";
}

auto parse_tool_category(std::string_view name) -> std::optional<ToolCategory>
{
    for (auto const category: all_tool_categories())
        if (detail::iequals(name, to_string(category)))
            return category;
    return std::nullopt;
}

auto all_tool_categories() -> std::vector<ToolCategory>
{
    return { ToolCategory::Summarization, ToolCategory::ContentDetection, ToolCategory::SpecializedCompliance };
}

// {{{ ToolOutput serialization

namespace
{

auto normalize_score(const nlohmann::json& value, std::string_view where) -> double
{
    if (!value.is_number())
        throw Error(ErrorKind::InvalidToolOutput, fmt::format("{}: score must be a number", where));
    auto const score = value.get<double>();
    if (!std::isfinite(score) || score < 0.0 || score > 100.0)
        throw Error(ErrorKind::InvalidToolOutput, fmt::format("{}: score {} out of range", where, score));
    return score > 1.0 ? score / 100.0 : score;
}

auto optional_string(const nlohmann::json& obj, const char* key, std::string_view where) -> std::optional<std::string>
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return std::nullopt;
    if (!obj.at(key).is_string())
        throw Error(ErrorKind::InvalidToolOutput, fmt::format("{}: '{}' must be a string", where, key));
    return obj.at(key).get<std::string>();
}

auto required_label(const nlohmann::json& obj, std::string_view where) -> std::string
{
    if (!obj.is_object() || !obj.contains("label") || !obj.at("label").is_string())
        throw Error(ErrorKind::InvalidToolOutput, fmt::format("{}: entries need a string 'label'", where));
    return obj.at("label").get<std::string>();
}

auto parse_bbox(const nlohmann::json& json, std::string_view where) -> BoundingBox
{
    auto const coord = [&](const char* key) {
        if (!json.contains(key) || !json.at(key).is_number())
            throw Error(ErrorKind::InvalidToolOutput, fmt::format("{}: bbox.{} missing", where, key));
        auto const v = json.at(key).get<double>();
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw Error(ErrorKind::InvalidToolOutput, fmt::format("{}: bbox.{} not normalized", where, key));
        return v;
    };
    return { coord("left"), coord("top"), coord("width"), coord("height") };
}

void check_range(const ToolOutput& output)
{
    auto const bad = [](double s) { return !std::isfinite(s) || s < 0.0 || s > 1.0; };
    for (auto const& d: output.detections)
        if (bad(d.score))
            throw Error(ErrorKind::InvalidToolOutput, fmt::format("detection '{}' score {} outside [0,1]", d.label, d.score));
    for (auto const& m: output.moderation_labels)
        if (bad(m.score))
            throw Error(ErrorKind::InvalidToolOutput, fmt::format("moderation label '{}' score {} outside [0,1]", m.label, m.score));
}

} // namespace

auto to_json(const ToolOutput& output) -> nlohmann::json
{
    auto json = nlohmann::json { { "tool_name", output.tool_name } };
    if (!output.detections.empty())
    {
        auto detections = nlohmann::json::array();
        for (auto const& d: output.detections)
        {
            auto item = nlohmann::json { { "label", d.label }, { "score", d.score } };
            if (d.bbox)
                item["bbox"] = { { "left", d.bbox->left }, { "top", d.bbox->top }, { "width", d.bbox->width }, { "height", d.bbox->height } };
            if (d.text)
                item["text"] = *d.text;
            detections.push_back(std::move(item));
        }
        json["detections"] = std::move(detections);
    }
    if (output.summary)
        json["summary"] = *output.summary;
    if (!output.moderation_labels.empty())
    {
        auto labels = nlohmann::json::array();
        for (auto const& m: output.moderation_labels)
        {
            auto item = nlohmann::json { { "label", m.label }, { "score", m.score } };
            if (m.severity)
                item["severity"] = *m.severity;
            labels.push_back(std::move(item));
        }
        json["moderation_labels"] = std::move(labels);
    }
    if (!output.extra.empty())
        json["extra"] = output.extra;
    return json;
}

auto tool_output_from_json(const nlohmann::json& json, std::string_view expected_tool) -> ToolOutput
{
    if (!json.is_object())
        throw Error(ErrorKind::InvalidToolOutput, "tool output must be a JSON object");

    auto output = ToolOutput {};
    output.tool_name = optional_string(json, "tool_name", "tool output").value_or(std::string(expected_tool));
    if (!expected_tool.empty() && output.tool_name != expected_tool)
        throw Error(ErrorKind::InvalidToolOutput,
                    fmt::format("output names tool '{}' but '{}' was invoked", output.tool_name, expected_tool));

    if (json.contains("detections"))
    {
        if (!json["detections"].is_array())
            throw Error(ErrorKind::InvalidToolOutput, "'detections' must be a list");
        for (auto const& item: json["detections"])
        {
            auto detection = Detection {};
            detection.label = required_label(item, "detections");
            detection.score = normalize_score(item.value("score", nlohmann::json {}), detection.label);
            if (item.contains("bbox") && !item["bbox"].is_null())
                detection.bbox = parse_bbox(item["bbox"], detection.label);
            detection.text = optional_string(item, "text", detection.label);
            output.detections.push_back(std::move(detection));
        }
    }
    output.summary = optional_string(json, "summary", "tool output");
    if (json.contains("moderation_labels"))
    {
        if (!json["moderation_labels"].is_array())
            throw Error(ErrorKind::InvalidToolOutput, "'moderation_labels' must be a list");
        for (auto const& item: json["moderation_labels"])
        {
            auto label = ModerationLabel {};
            label.label = required_label(item, "moderation_labels");
            label.score = normalize_score(item.value("score", nlohmann::json {}), label.label);
            label.severity = optional_string(item, "severity", label.label);
            output.moderation_labels.push_back(std::move(label));
        }
    }
    if (json.contains("extra"))
    {
        if (!json["extra"].is_object())
            throw Error(ErrorKind::InvalidToolOutput, "'extra' must be an object");
        for (auto const& [key, value]: json["extra"].items())
            output.extra[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return output;
}

// }}}

// {{{ ToolRegistry

void ToolRegistry::register_tool(ToolDescriptor descriptor, ToolInvoker invoker)
{
    if (descriptor.name.empty() || detail::trim(descriptor.description).empty())
        throw Error(ErrorKind::Config, "tool descriptors need a name and a description");
    if (lookup(descriptor.name) != nullptr)
        throw Error(ErrorKind::DuplicateTool, fmt::format("tool '{}' is already registered", descriptor.name));
    if (descriptor.display_name.empty())
        descriptor.display_name = descriptor.name;
    _entries.push_back({ std::move(descriptor), std::move(invoker) });
}

void ToolRegistry::disable(std::string_view tool_or_category)
{
    if (auto const category = parse_tool_category(tool_or_category))
    {
        _disabled.insert(std::string(to_string(*category)));
        return;
    }
    for (auto const& entry: _entries)
        if (detail::iequals(entry.descriptor.name, tool_or_category)
            || detail::iequals(entry.descriptor.display_name, tool_or_category))
        {
            _disabled.insert(entry.descriptor.name);
            return;
        }
    throw Error(ErrorKind::Config, fmt::format("cannot disable '{}': no such tool or category", tool_or_category));
}

auto ToolRegistry::entry_enabled(const Entry& entry) const -> bool
{
    return !_disabled.contains(entry.descriptor.name)
           && !_disabled.contains(std::string(to_string(entry.descriptor.category)));
}

auto ToolRegistry::lookup(std::string_view name) const -> const Entry*
{
    for (auto const& entry: _entries)
        if (entry.descriptor.name == name)
            return &entry;
    return nullptr;
}

auto ToolRegistry::is_enabled(std::string_view name) const -> bool
{
    auto const* entry = lookup(name);
    return entry != nullptr && entry_enabled(*entry);
}

auto ToolRegistry::contains(std::string_view name) const -> bool
{
    return lookup(name) != nullptr;
}

auto ToolRegistry::find(std::string_view name) const -> const ToolDescriptor*
{
    auto const* entry = lookup(name);
    return entry != nullptr && entry_enabled(*entry) ? &entry->descriptor : nullptr;
}

auto ToolRegistry::list_descriptors() const -> std::vector<ToolDescriptor>
{
    auto list = std::vector<ToolDescriptor> {};
    for (auto const& entry: _entries)
        if (entry_enabled(entry))
            list.push_back(entry.descriptor);
    return list;
}

auto ToolRegistry::execute_tool(std::string_view name, const ImageRef& image, const ToolArgs& args) const
    -> ToolExecution
{
    auto execution = ToolExecution { .tool_name = std::string(name), .output = {}, .error = {}, .elapsed_ms = 0 };
    auto const fail = [&](ErrorKind kind, std::string message) {
        execution.error = ToolError { kind, std::move(message) };
        return execution;
    };

    auto const* entry = lookup(name);
    if (entry == nullptr)
        return fail(ErrorKind::UnknownTool, fmt::format("unknown tool '{}'", name));
    if (!entry_enabled(*entry))
        return fail(ErrorKind::UnknownTool, fmt::format("tool '{}' is disabled", name));
    if (auto const violation = validate_args(entry->descriptor, args))
        return fail(ErrorKind::ArgsSchema, fmt::format("{}: {}", name, *violation));

    auto const started = std::chrono::steady_clock::now();
    auto const elapsed = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    };
    try
    {
        auto output = entry->invoker(entry->descriptor, image, args);
        if (output.tool_name.empty())
            output.tool_name = entry->descriptor.name;
        if (output.tool_name != entry->descriptor.name)
            throw Error(ErrorKind::InvalidToolOutput, fmt::format("output names tool '{}'", output.tool_name));
        if (output.empty())
            throw Error(ErrorKind::InvalidToolOutput, "tool returned an empty output");
        check_range(output);
        execution.output = std::move(output);
    }
    catch (const Error& e)
    {
        auto const kind = e.kind() == ErrorKind::FixtureMiss || e.kind() == ErrorKind::FixtureParse
                                  || e.kind() == ErrorKind::InvalidToolOutput
                              ? e.kind()
                              : ErrorKind::InvokerFailure;
        execution.error = ToolError { kind, fmt::format("{}: {}", name, e.what()) };
    }
    catch (const std::exception& e)
    {
        execution.error = ToolError { ErrorKind::InvokerFailure, fmt::format("{}: {}", name, e.what()) };
    }
    execution.elapsed_ms = elapsed();
    return execution;
}

// }}}

auto validate_args(const ToolDescriptor& descriptor, const ToolArgs& args) -> std::optional<std::string>
{
    if (args.is_null())
        return validate_args(descriptor, nlohmann::json::object());
    if (!args.is_object())
        return "arguments must be a JSON object";

    for (auto const& spec: descriptor.args_schema)
    {
        if (!args.contains(spec.name))
        {
            if (spec.required)
                return fmt::format("missing required argument '{}'", spec.name);
            continue;
        }
        auto const& value = args.at(spec.name);
        auto const ok = [&] {
            switch (spec.type)
            {
                case ArgType::String: return value.is_string();
                case ArgType::Integer: return value.is_number_integer();
                case ArgType::Number: return value.is_number();
                case ArgType::Boolean: return value.is_boolean();
            }
            return false;
        }();
        if (!ok)
            return fmt::format("argument '{}' has the wrong type", spec.name);
    }
    for (auto const& [key, _]: args.items())
    {
        auto const known = std::any_of(descriptor.args_schema.begin(), descriptor.args_schema.end(),
                                       [&](auto const& spec) { return spec.name == key; });
        if (!known)
            return fmt::format("unexpected argument '{}'", key);
    }
    return std::nullopt;
}

auto bundled_descriptors() -> std::vector<ToolDescriptor>
{
    using enum ToolCategory;
    return {
        {
            .name = "image_summary",
            .display_name = "Image Summary",
            .description = "Produces a natural-language description of the whole image by combining several "
                           "captioning models. Use it first to establish overall context before choosing "
                           "specialized tools. Optional 'focus' steers the description toward one aspect "
                           "(e.g. \"people\", \"text\", \"objects\"). Limitations: may miss small objects and "
                           "does not judge policy compliance.",
            .args_schema = { { "focus", ArgType::String, false, "aspect to emphasize" } },
            .category = Summarization,
        },
        {
            .name = "face_detection",
            .display_name = "Face Detection",
            .description = "Locates faces and reports attributes such as estimated age range, expression and "
                           "occlusion, without identifying anyone. Use when the policy depends on the presence, "
                           "age or emotional state of people. Limitations: unreliable on small, profile or "
                           "heavily stylized faces.",
            .args_schema = {},
            .category = ContentDetection,
        },
        {
            .name = "object_detection",
            .display_name = "Object Detection",
            .description = "Identifies and localizes objects with confidence scores and normalized bounding "
                           "boxes. Use for weapons, drugs, alcohol, animals or other physical items named by the "
                           "policy. Optional 'max_labels' bounds the number of returned objects. Limitations: "
                           "labels are generic and carry no notion of context or intent.",
            .args_schema = { { "max_labels", ArgType::Integer, false, "maximum objects to return" } },
            .category = ContentDetection,
        },
        {
            .name = "text_detection",
            .display_name = "Text Detection",
            .description = "Optical character recognition with word-level detections and their positions. Use "
                           "when signs, captions, screenshots or symbols may carry the violation. Limitations: "
                           "handwriting and non-Latin scripts degrade accuracy; text meaning is not interpreted.",
            .args_schema = {},
            .category = ContentDetection,
        },
        {
            .name = "content_moderation",
            .display_name = "Content Moderation",
            .description = "Runs several moderation models and returns unsafe-content labels with confidence "
                           "and severity. Use as a broad screen for explicit, violent or drug-related content. "
                           "Limitations: taxonomy differs from the active policy and over-flags artistic or "
                           "educational material.",
            .args_schema = {},
            .category = ContentDetection,
        },
        {
            .name = "llavaguard_classification",
            .display_name = "LlavaGuard Classification",
            .description = "Vision-language safeguard model that returns a safety rating, a policy category and "
                           "a rationale for the image. Use for a policy-aware second opinion on borderline "
                           "content. Limitations: trained on one taxonomy and tends to be conservative on "
                           "historical or documentary imagery.",
            .args_schema = {},
            .category = SpecializedCompliance,
        },
        {
            .name = "safe_clip",
            .display_name = "Safe-CLIP",
            .description = "Zero-shot CLIP-based toxicity detector scoring seven categories including explicit "
                           "content, violence and prohibited substances. Use for fast confirmation of suspected "
                           "toxic content. Limitations: no rationale; high recall but low precision.",
            .args_schema = {},
            .category = SpecializedCompliance,
        },
        {
            .name = "icm_assistant",
            .display_name = "ICM Assistant",
            .description = "Template-based moderation assistant that matches the image against predefined "
                           "violation templates and explains which visual elements triggered a match. Use when "
                           "an auditable, element-level explanation is needed. Limitations: only recognizes "
                           "violations covered by its templates.",
            .args_schema = {},
            .category = SpecializedCompliance,
        },
    };
}

auto fixture_invoker(std::filesystem::path store_root) -> ToolInvoker
{
    if (!std::filesystem::is_directory(store_root))
        throw Error(ErrorKind::Config, fmt::format("fixture store {} does not exist", store_root.string()));

    return [root = std::move(store_root)](const ToolDescriptor& tool, const ImageRef& image, const ToolArgs&) {
        auto const path = root / tool.name / (image.id + ".json");
        auto in = std::ifstream(path);
        if (!in)
            throw Error(ErrorKind::FixtureMiss, fmt::format("no fixture {}", path.string()));
        auto const json = nlohmann::json::parse(in, nullptr, false);
        if (json.is_discarded())
            throw Error(ErrorKind::FixtureParse, fmt::format("fixture {} is not valid JSON", path.string()));
        if (json.is_object() && json.contains("error"))
            throw Error(ErrorKind::InvokerFailure, json["error"].is_string() ? json["error"].get<std::string>() : json["error"].dump());
        try
        {
            return tool_output_from_json(json, tool.name);
        }
        catch (const Error& e)
        {
            throw Error(ErrorKind::FixtureParse, fmt::format("fixture {}: {}", path.string(), e.what()));
        }
    };
}

auto remote_invoker(RemoteToolConfig config) -> ToolInvoker
{
    return [config = std::move(config)](const ToolDescriptor& tool, const ImageRef& image, const ToolArgs& args) {
        auto image_json = nlohmann::json {
            { "id", image.id },
            { "location", image.location },
            { "media_type", image.media_type },
        };
        if (image.bytes || !is_remote_location(image.location))
            image_json["bytes_base64"] = detail::base64_encode(load_image_bytes(image));

        auto const body = nlohmann::json {
            { "tool", tool.name },
            { "image", std::move(image_json) },
            { "args", args.is_null() ? nlohmann::json::object() : args },
        };

        auto headers = detail::Headers {};
        if (!config.auth_env.empty())
        {
            auto const* token = std::getenv(config.auth_env.c_str());
            if (token == nullptr)
                throw Error(ErrorKind::Config, fmt::format("credential env var {} is not set", config.auth_env));
            headers.emplace_back("Authorization", fmt::format("Bearer {}", token));
        }

        auto const reply = detail::post_json(config.endpoint, body.dump(), headers, config.timeout);
        detail::check_status(reply, fmt::format("tool {}", tool.name));
        auto const json = nlohmann::json::parse(reply.body, nullptr, false);
        if (json.is_discarded())
            throw Error(ErrorKind::InvalidToolOutput, fmt::format("tool {}: reply is not JSON", tool.name));
        return tool_output_from_json(json, tool.name);
    };
}

auto make_bundled_registry(const ToolInvoker& invoker) -> ToolRegistry
{
    auto registry = ToolRegistry {};
    for (auto& descriptor: bundled_descriptors())
        registry.register_tool(std::move(descriptor), invoker);
    return registry;
}

} // namespace compagent
