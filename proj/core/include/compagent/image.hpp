// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace compagent
{

/// Opaque image attachment. Pixels are never decoded here.
struct ImageRef
{
    std::string id;
    std::string location; // filesystem path or URI
    std::string media_type = "image/png";
    std::optional<std::string> bytes;

    auto operator==(const ImageRef&) const -> bool = default;
};

auto guess_media_type(const std::filesystem::path& path) -> std::string;

/// ImageRef for a local file; the id is the file stem.
auto image_from_path(const std::filesystem::path& path) -> ImageRef;

/// Payload bytes, reading `location` when none are attached.
/// Throws Error{Io} when the location cannot be read.
auto load_image_bytes(const ImageRef& image) -> std::string;

auto is_remote_location(const std::string& location) -> bool;

} // namespace compagent
