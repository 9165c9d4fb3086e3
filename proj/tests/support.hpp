// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/llm_client.hpp>
#include <compagent/policy.hpp>
#include <compagent/tool_suite.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace compagent::test
{

inline auto data_dir() -> std::filesystem::path
{
    return COMPAGENT_TEST_DATA_DIR;
}

inline auto bundle_dir() -> std::filesystem::path
{
    return data_dir() / "bundle";
}

inline auto llavaguard() -> std::shared_ptr<const Policy>
{
    static auto const policy = std::make_shared<const Policy>(load_policy_file(data_dir() / "policies/llavaguard.json"));
    return policy;
}

inline auto unsafebench() -> std::shared_ptr<const Policy>
{
    static auto const policy = std::make_shared<const Policy>(load_policy_file(data_dir() / "policies/unsafebench.json"));
    return policy;
}

inline auto read_file(const std::filesystem::path& path) -> std::string
{
    auto in = std::ifstream(path, std::ios::binary);
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text)
{
    std::filesystem::create_directories(path.parent_path());
    auto out = std::ofstream(path, std::ios::binary);
    out << text;
}

/// Fresh directory removed on destruction.
class TempDir
{
  public:
    TempDir()
    {
        static auto counter = std::atomic<int> { 0 };
        _path = std::filesystem::temp_directory_path()
                / ("compagent-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(_path);
        std::filesystem::create_directories(_path);
    }
    ~TempDir() { std::filesystem::remove_all(_path); }
    TempDir(const TempDir&) = delete;
    auto operator=(const TempDir&) -> TempDir& = delete;

    [[nodiscard]] auto path() const -> const std::filesystem::path& { return _path; }

  private:
    std::filesystem::path _path;
};

/// Chat client driven by a callback; records every request.
class FakeClient final: public ChatClient
{
  public:
    using Handler = std::function<std::string(const ChatRequest&, std::size_t call)>;

    explicit FakeClient(Handler handler): _handler(std::move(handler)) {}

    auto complete(const ChatRequest& request) -> ChatResponse override
    {
        auto const lock = std::lock_guard(_mutex);
        requests.push_back(request);
        return ChatResponse { _handler(request, requests.size() - 1), {}, 0 };
    }

    std::vector<ChatRequest> requests;

  private:
    Handler _handler;
    std::mutex _mutex;
};

/// Responses replayed in order, regardless of the request.
inline auto sequence_client(std::vector<std::string> replies) -> std::unique_ptr<ScriptedClient>
{
    auto entries = std::vector<ScriptEntry> {};
    for (auto i = std::size_t { 0 }; i < replies.size(); ++i)
        entries.push_back(ScriptEntry { std::nullopt, i, "", std::move(replies[i]) });
    return std::make_unique<ScriptedClient>(std::move(entries));
}

/// Invoker returning a one-line summary naming the tool and image.
inline auto echo_invoker() -> ToolInvoker
{
    return [](const ToolDescriptor& tool, const ImageRef& image, const ToolArgs&) {
        auto output = ToolOutput {};
        output.tool_name = tool.name;
        output.summary = tool.name + " on " + image.id;
        return output;
    };
}

inline auto test_image(std::string id = "img") -> ImageRef
{
    return ImageRef { id, "/nonexistent/" + id + ".png", "image/png", std::string("PNG") };
}

} // namespace compagent::test
