// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace compagent::detail
{

auto sha256_hex(std::string_view data) -> std::string;
auto base64_encode(std::string_view data) -> std::string;

} // namespace compagent::detail
