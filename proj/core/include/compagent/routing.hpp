// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/assessment.hpp>
#include <compagent/llm_client.hpp>
#include <compagent/state.hpp>
#include <compagent/tool_suite.hpp>
#include <compagent/trace.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace compagent
{

inline constexpr auto cluster_count = 5;

/// Cluster id (1..5) to the ordered tools executed for it.
class ClusterMap
{
  public:
    /// 1: object_detection, content_moderation
    /// 2: face_detection, content_moderation, image_summary
    /// 3: text_detection, image_summary
    /// 4: image_summary, llavaguard_classification, icm_assistant
    /// 5: none
    static auto defaults() -> ClusterMap;

    /// {"1": [...], ..., "5": []}. Throws Error{Config}.
    static auto from_json(const nlohmann::json& json) -> ClusterMap;
    static auto load(const std::filesystem::path& path) -> ClusterMap;

    [[nodiscard]] auto tools_for(int cluster) const -> const std::vector<std::string>&;
    [[nodiscard]] auto to_json() const -> nlohmann::json;

    /// Every mapped tool must be registered. Throws Error{Config}.
    void validate(const ToolRegistry& registry) const;

  private:
    std::map<int, std::vector<std::string>> _tools;
};

/// Parses <description>, <cluster>Cluster N</cluster> and <reasoning>.
/// Throws Error{RoutingParse}; N outside 1..5 is never clamped.
auto parse_route(std::string_view text) -> RouteDecision;

struct ModelSettings
{
    std::string model_id;
    Decoding decoding {};
};

/// Throws Error{RoutingParse} (as ModelOutputError) or client errors.
auto route(const ImageRef& image, ChatClient& llm, const ModelSettings& model) -> RouteDecision;

/// Per-tool sections in input order; detections and moderation labels by
/// descending score; errors as notes. Empty input yields
/// "no tool metadata available".
auto fuse_metadata(std::span<const Evidence> results) -> std::string;
auto fuse_metadata(std::span<const ToolOutput> outputs) -> std::string;

inline constexpr std::string_view empty_metadata = "no tool metadata available";

/// Route, run the cluster's tools in map order, fuse, assess once. The
/// returned trace records the executed tools as its trajectory. Throws
/// RunFailure with the partial trace.
auto assess_with_routing(const ImageRef& image, std::shared_ptr<const Policy> policy, const ToolRegistry& registry,
                         const ClusterMap& clusters, ChatClient& llm, const ModelSettings& router,
                         const ModelSettings& assessor) -> TraceRecord;

/// Policy prompt and image only, tagged answer. Throws RunFailure.
auto zero_shot_assess(const ImageRef& image, std::shared_ptr<const Policy> policy, ChatClient& llm,
                      const ModelSettings& model) -> TraceRecord;

} // namespace compagent
