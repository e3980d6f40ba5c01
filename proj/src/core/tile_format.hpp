#pragma once

#include <filesystem>
#include <string>

#include "core/tile.hpp"

namespace apc {

// Canonical tile container: magic "APCT", u32 version (=1), a field table of
// (name, element type, count), little-endian columnar payload, and a trailing
// CRC32 of the payload bytes. read(write(t)) == t exactly.
std::string encode_tile(const Tile& tile);
Tile decode_tile(const std::string& bytes, const std::string& origin = "<memory>");

void write_tile(const Tile& tile, const std::filesystem::path& path);
Tile read_tile(const std::filesystem::path& path);

}  // namespace apc
