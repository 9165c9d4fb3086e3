// SPDX-License-Identifier: Apache-2.0
#include <compagent_cli/engine.hpp>

#include <compagent/error.hpp>

#include <fmt/format.h>

#include <fstream>

namespace compagent::cli
{

namespace fs = std::filesystem;

auto parse_mode(std::string_view name) -> std::optional<Mode>
{
    if (name == "live")
        return Mode::Live;
    if (name == "replay")
        return Mode::Replay;
    return std::nullopt;
}

namespace
{

auto config_error(const fs::path& source, std::string_view what) -> Error
{
    return Error(ErrorKind::Config, fmt::format("{}: {}", source.string(), what));
}

template <typename T>
auto get_or(const nlohmann::json& json, std::string_view key, T fallback, const fs::path& source) -> T
{
    auto const it = json.find(key);
    if (it == json.end() || it->is_null())
        return fallback;
    try
    {
        return it->get<T>();
    }
    catch (const nlohmann::json::exception&)
    {
        throw config_error(source, fmt::format("'{}' has the wrong type", key));
    }
}

auto resolve(const fs::path& source, const std::string& value) -> fs::path
{
    auto const path = fs::path(value);
    return path.is_absolute() ? path : source.parent_path() / path;
}

auto section(const nlohmann::json& json, std::string_view key, const fs::path& source) -> nlohmann::json
{
    auto const it = json.find(key);
    if (it == json.end() || it->is_null())
        return nlohmann::json::object();
    if (!it->is_object())
        throw config_error(source, fmt::format("'{}' must be an object", key));
    return *it;
}

} // namespace

auto parse_engine_config(const nlohmann::json& json, const fs::path& source) -> EngineConfig
{
    if (!json.is_object())
        throw config_error(source, "configuration must be a JSON object");

    auto config = EngineConfig {};
    config.source = source;

    auto const mode = get_or<std::string>(json, "mode", "replay", source);
    if (auto parsed = parse_mode(mode))
        config.mode = *parsed;
    else
        throw config_error(source, fmt::format("mode '{}' is neither live nor replay", mode));

    auto const provider = section(json, "provider", source);
    config.provider.endpoint = get_or<std::string>(provider, "endpoint", "", source);
    config.provider.api_key_env = get_or<std::string>(provider, "api_key_env", "", source);
    config.provider.timeout = std::chrono::milliseconds(get_or<long>(provider, "timeout_ms", 60'000, source));
    config.provider.max_retries = get_or<int>(provider, "max_retries", 1, source);
    config.provider.backoff = std::chrono::milliseconds(get_or<long>(provider, "backoff_ms", 500, source));

    auto const models = section(json, "models", source);
    config.models.planner = get_or<std::string>(models, "planner", config.models.planner, source);
    config.models.verifier = get_or<std::string>(models, "verifier", config.models.verifier, source);
    config.models.router = get_or<std::string>(models, "router", config.models.router, source);
    config.models.assessor = get_or<std::string>(models, "assessor", config.models.assessor, source);

    if (auto const store = get_or<std::string>(json, "fixture_store", "", source); !store.empty())
        config.fixture_store = resolve(source, store);
    auto const scripts = section(json, "scripts", source);
    for (auto const& [pipeline, path]: scripts.items())
    {
        if (!parse_pipeline(pipeline))
            throw config_error(source, fmt::format("scripts: unknown pipeline '{}'", pipeline));
        if (!path.is_string())
            throw config_error(source, fmt::format("scripts.{} must be a path", pipeline));
        config.scripts[pipeline] = resolve(source, path.get<std::string>());
    }

    auto const policy = get_or<std::string>(json, "policy", "", source);
    if (policy.empty())
        throw config_error(source, "'policy' is required");
    config.policy = resolve(source, policy);
    if (auto const map = get_or<std::string>(json, "cluster_map", "", source); !map.empty())
        config.cluster_map = resolve(source, map);

    auto const run = section(json, "run", source);
    config.run.max_steps = get_or<int>(run, "max_steps", config.run.max_steps, source);
    config.run.repeat_call_limit = get_or<int>(run, "repeat_call_limit", config.run.repeat_call_limit, source);
    config.run.fused_mode = get_or<bool>(run, "fused_mode", config.run.fused_mode, source);
    config.run.attach_image_to_planner =
        get_or<bool>(run, "attach_image_to_planner", config.run.attach_image_to_planner, source);
    config.run.decoding.temperature = get_or<double>(run, "temperature", config.run.decoding.temperature, source);
    config.run.decoding.max_tokens = get_or<int>(run, "max_tokens", config.run.decoding.max_tokens, source);
    config.workers = get_or<std::size_t>(run, "workers", config.workers, source);
    if (config.workers == 0)
        throw config_error(source, "run.workers must be at least 1");

    config.disable = get_or<std::vector<std::string>>(json, "disable", {}, source);

    if (auto const it = json.find("remote_tools"); it != json.end() && !it->is_null())
    {
        if (!it->is_object())
            throw config_error(source, "'remote_tools' must map tool names to {endpoint, auth_env}");
        for (auto const& [tool, entry]: it->items())
        {
            if (!entry.is_object())
                throw config_error(source, fmt::format("remote_tools.{} must be an object", tool));
            config.remote_tools.push_back(RemoteToolConfig {
                .tool_name = tool,
                .endpoint = get_or<std::string>(entry, "endpoint", "", source),
                .auth_env = get_or<std::string>(entry, "auth_env", "", source),
                .timeout = std::chrono::milliseconds(get_or<long>(entry, "timeout_ms", 30'000, source)),
            });
        }
    }
    return config;
}

auto load_engine_config(const fs::path& path) -> EngineConfig
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::Config, fmt::format("cannot open config file {}", path.string()));
    auto const json = nlohmann::json::parse(in, nullptr, false);
    if (json.is_discarded())
        throw config_error(path, "not valid JSON");
    return parse_engine_config(json, path);
}

void validate(const EngineConfig& config, Pipeline pipeline)
{
    auto const require = [&](const fs::path& path, std::string_view what) {
        if (!fs::exists(path))
            throw config_error(config.source, fmt::format("{} {} does not exist", what, path.string()));
    };
    require(config.policy, "policy file");
    if (config.cluster_map)
        require(*config.cluster_map, "cluster map");
    if (config.fixture_store)
        require(*config.fixture_store, "fixture store");
    config.run.validate();

    if (config.mode == Mode::Replay)
    {
        auto const it = config.scripts.find(std::string(to_string(pipeline)));
        if (it == config.scripts.end())
            throw config_error(config.source, fmt::format("replay mode needs scripts.{}", to_string(pipeline)));
        require(it->second, "script");
        if (pipeline != Pipeline::ZeroShot && !config.fixture_store)
            throw config_error(config.source, "replay mode needs a fixture_store");
        return;
    }

    if (config.provider.endpoint.empty())
        throw config_error(config.source, "live mode needs provider.endpoint");
    for (auto const* id: { &config.models.planner, &config.models.verifier, &config.models.router, &config.models.assessor })
        if (id->empty())
            throw config_error(config.source, "live mode needs non-empty model ids");
    for (auto const& remote: config.remote_tools)
        if (remote.endpoint.empty())
            throw config_error(config.source, fmt::format("remote_tools.{} needs an endpoint", remote.tool_name));
}

namespace
{

/// Remote endpoints where configured, fixtures otherwise.
auto make_invoker(const EngineConfig& config) -> ToolInvoker
{
    auto remote = std::map<std::string, ToolInvoker> {};
    if (config.mode == Mode::Live)
        for (auto const& tool: config.remote_tools)
            remote.emplace(tool.tool_name, remote_invoker(tool));
    auto fixtures = config.fixture_store ? fixture_invoker(*config.fixture_store) : ToolInvoker {};

    return [remote = std::move(remote), fixtures = std::move(fixtures)](const ToolDescriptor& tool,
                                                                         const ImageRef& image, const ToolArgs& args) {
        if (auto const it = remote.find(tool.name); it != remote.end())
            return it->second(tool, image, args);
        if (fixtures)
            return fixtures(tool, image, args);
        throw Error(ErrorKind::Config, fmt::format("no endpoint or fixture store configured for tool {}", tool.name));
    };
}

} // namespace

auto build_engine(const EngineConfig& config, Pipeline pipeline) -> Engine
{
    validate(config, pipeline);

    auto engine = Engine {};
    engine.policy = std::make_shared<const Policy>(load_policy_file(config.policy));
    engine.registry = std::make_unique<ToolRegistry>(make_bundled_registry(make_invoker(config)));
    for (auto const& name: config.disable)
        engine.registry->disable(name);

    if (config.mode == Mode::Replay)
        engine.llm = std::make_unique<ScriptedClient>(load_script(config.scripts.at(std::string(to_string(pipeline)))));
    else
        engine.llm = std::make_unique<HttpChatClient>(config.provider);

    auto& setup = engine.setup;
    setup.policy = engine.policy;
    setup.registry = engine.registry.get();
    setup.llm = engine.llm.get();
    setup.run = config.run;
    setup.run.planner_model_id = config.models.planner;
    setup.run.verifier_model_id = config.models.verifier;
    setup.clusters = config.cluster_map ? ClusterMap::load(*config.cluster_map) : ClusterMap::defaults();
    setup.router = ModelSettings { config.models.router, config.run.decoding };
    setup.assessor = ModelSettings { config.models.assessor, config.run.decoding };
    setup.workers = config.workers;
    setup.include_timings = config.mode == Mode::Live;
    setup.clusters.validate(*engine.registry);
    return engine;
}

} // namespace compagent::cli
