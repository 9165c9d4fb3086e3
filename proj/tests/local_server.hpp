// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <httplib.h>

#include <functional>
#include <string>
#include <string_view>
#include <thread>

namespace compagent::test
{

/// HTTP server on an ephemeral loopback port, stopped on destruction.
class LocalServer
{
  public:
    explicit LocalServer(const std::function<void(httplib::Server&)>& setup)
    {
        setup(_server);
        _port = _server.bind_to_any_port("127.0.0.1");
        _thread = std::thread([this] { _server.listen_after_bind(); });
        _server.wait_until_ready();
    }
    ~LocalServer()
    {
        _server.stop();
        _thread.join();
    }
    LocalServer(const LocalServer&) = delete;
    auto operator=(const LocalServer&) -> LocalServer& = delete;

    [[nodiscard]] auto url(std::string_view path) const -> std::string
    {
        return "http://127.0.0.1:" + std::to_string(_port) + std::string(path);
    }

  private:
    httplib::Server _server;
    int _port = 0;
    std::thread _thread;
};

} // namespace compagent::test
