// SPDX-License-Identifier: Apache-2.0
#include <compagent/error.hpp>
#include <compagent/image.hpp>

#include "text_util.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iterator>

namespace compagent
{

auto guess_media_type(const std::filesystem::path& path) -> std::string
{
    auto const ext = detail::to_lower(path.extension().string());
    if (ext == ".jpg" || ext == ".jpeg")
        return "image/jpeg";
    if (ext == ".gif")
        return "image/gif";
    if (ext == ".webp")
        return "image/webp";
    return "image/png";
}

auto image_from_path(const std::filesystem::path& path) -> ImageRef
{
    return ImageRef {
        .id = path.stem().string(),
        .location = path.string(),
        .media_type = guess_media_type(path),
        .bytes = std::nullopt,
    };
}

auto is_remote_location(const std::string& location) -> bool
{
    return detail::istarts_with(location, "http://") || detail::istarts_with(location, "https://");
}

auto load_image_bytes(const ImageRef& image) -> std::string
{
    if (image.bytes)
        return *image.bytes;
    auto in = std::ifstream(image.location, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("image '{}': cannot read {}", image.id, image.location));
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

} // namespace compagent
