// SPDX-License-Identifier: Apache-2.0
#include "encoding.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace compagent::detail
{

auto sha256_hex(std::string_view data) -> std::string
{
    auto digest = std::array<unsigned char, EVP_MAX_MD_SIZE> {};
    auto length = 0u;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("EVP_Digest failed");

    static constexpr char hex[] = "0123456789abcdef";
    auto out = std::string {};
    out.reserve(length * 2);
    for (auto i = 0u; i < length; ++i)
    {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0x0f];
    }
    return out;
}

auto base64_encode(std::string_view data) -> std::string
{
    auto out = std::string(4 * ((data.size() + 2) / 3), '\0');
    auto const written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                         reinterpret_cast<const unsigned char*>(data.data()),
                                         static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

} // namespace compagent::detail
