// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace compagent::detail
{

struct HttpReply
{
    int status = 0;
    std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// POSTs a JSON body. Throws Error{Network} when no reply arrives and
/// Error{Config} for an unusable URL.
auto post_json(const std::string& url, const std::string& body, const Headers& headers,
               std::chrono::milliseconds timeout) -> HttpReply;

/// Maps an HTTP reply status onto the error contract: 2xx passes, 408/429/5xx
/// raise Error{Network}, other codes raise Error{ProviderRejected}.
void check_status(const HttpReply& reply, const std::string& what);

} // namespace compagent::detail
