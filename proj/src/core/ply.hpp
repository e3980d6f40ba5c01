#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/tile.hpp"

namespace apc {

// Parses an ASCII or binary-little-endian PLY vertex cloud. Recognized
// properties: x/y/z (required), red/green/blue, intensity, and a label-like
// column (label, class, classification, scalar_* variants). Anything else is
// skipped. Points without a label column receive kUnlabeledCode.
RawCloud parse_ply(const std::string& bytes);

// Optional extra per-vertex uchar column appended after the standard fields
// (used for the synthetic-point flag in exported samples).
using PlyExtraColumn = std::pair<std::string, std::vector<uint8_t>>;

// Serializes to binary little-endian PLY with double x/y/z, the optional
// channels present in the cloud, and an int32 label column. The vocab id is
// recorded as a header comment and restored by parse_ply.
std::string write_ply(const RawCloud& cloud,
                      const std::optional<PlyExtraColumn>& extra = std::nullopt);

}  // namespace apc
