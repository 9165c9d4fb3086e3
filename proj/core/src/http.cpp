// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <compagent/error.hpp>

#include "http.hpp"

#include <fmt/format.h>

namespace compagent::detail
{

namespace
{

struct SplitUrl
{
    std::string origin; // scheme://host[:port]
    std::string path;
};

auto split_url(const std::string& url) -> SplitUrl
{
    auto const scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::Config, fmt::format("not an absolute URL: '{}'", url));
    auto const path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return { url, "/" };
    return { url.substr(0, path_start), url.substr(path_start) };
}

} // namespace

auto post_json(const std::string& url, const std::string& body, const Headers& headers,
               std::chrono::milliseconds timeout) -> HttpReply
{
    auto const [origin, path] = split_url(url);
    auto client = httplib::Client(origin);
    if (!client.is_valid())
        throw Error(ErrorKind::Config, fmt::format("unsupported URL '{}'", url));

    auto const seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto const micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    auto http_headers = httplib::Headers {};
    for (auto const& [name, value]: headers)
        http_headers.emplace(name, value);

    auto result = client.Post(path, http_headers, body, "application/json");
    if (!result)
        throw Error(ErrorKind::Network, fmt::format("POST {} failed: {}", url, httplib::to_string(result.error())));
    return { result->status, result->body };
}

void check_status(const HttpReply& reply, const std::string& what)
{
    if (reply.status >= 200 && reply.status < 300)
        return;
    auto const snippet = reply.body.substr(0, 200);
    if (reply.status == 408 || reply.status == 429 || reply.status >= 500)
        throw Error(ErrorKind::Network, fmt::format("{}: HTTP {} {}", what, reply.status, snippet));
    throw Error(ErrorKind::ProviderRejected, fmt::format("{}: HTTP {} {}", what, reply.status, snippet));
}

} // namespace compagent::detail
