// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/eval.hpp>
#include <compagent/llm_client.hpp>
#include <compagent/planner.hpp>
#include <compagent/policy.hpp>
#include <compagent/routing.hpp>
#include <compagent/tool_suite.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace compagent::cli
{

enum class Mode
{
    Live,
    Replay,
};

auto parse_mode(std::string_view name) -> std::optional<Mode>;

struct ModelIds
{
    std::string planner = "planner";
    std::string verifier = "verifier";
    std::string router = "router";
    std::string assessor = "assessor";
};

/// JSON engine configuration. Relative paths resolve against the config
/// file's directory.
struct EngineConfig
{
    std::filesystem::path source;
    Mode mode = Mode::Replay;
    ProviderConfig provider;
    ModelIds models;
    std::optional<std::filesystem::path> fixture_store;
    std::map<std::string, std::filesystem::path> scripts; // pipeline name -> script
    std::filesystem::path policy;
    std::optional<std::filesystem::path> cluster_map;
    RunConfig run;
    std::size_t workers = 4;
    std::vector<std::string> disable;
    std::vector<RemoteToolConfig> remote_tools;
};

/// Throws Error{Config | Io}; messages name the config path.
auto load_engine_config(const std::filesystem::path& path) -> EngineConfig;
auto parse_engine_config(const nlohmann::json& json, const std::filesystem::path& source) -> EngineConfig;

/// Referenced files exist for `pipeline`; live mode needs endpoint and
/// model ids. Throws Error{Config}.
void validate(const EngineConfig& config, Pipeline pipeline);

/// Everything needed to run one pipeline.
struct Engine
{
    std::shared_ptr<const Policy> policy;
    std::unique_ptr<ToolRegistry> registry;
    std::unique_ptr<ChatClient> llm;
    BenchmarkSetup setup;
};

auto build_engine(const EngineConfig& config, Pipeline pipeline) -> Engine;

} // namespace compagent::cli
