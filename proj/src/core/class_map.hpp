#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "core/tile.hpp"

namespace apc {

// Total mapping from one source vocabulary to the unified taxonomy.
// A map that leaves Ground, Building, or Vegetation empty is rejected.
struct ClassMap {
  std::string vocab_id;
  std::map<int32_t, UnifiedClass> entries;

  void validate() const;

  static ClassMap from_json_text(const std::string& text);
  static ClassMap load(const std::filesystem::path& path);
  std::string to_json_text() const;
};

struct RemapResult {
  std::vector<UnifiedClass> labels;
  ClassCounts counts;
};

// Applies the map to every point. The reserved unlabeled code maps to
// Undefined; any other code missing from the map is an error (stale map).
RemapResult remap_labels(const RawCloud& raw, const ClassMap& map);

}  // namespace apc
