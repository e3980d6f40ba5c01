#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/tile.hpp"

namespace apc {

enum class DatasetRole : uint8_t { Train = 0, Validation = 1, Test = 2 };

const char* to_string(DatasetRole role);
DatasetRole dataset_role_from_string(const std::string& name);

struct ManifestTile {
  std::filesystem::path path;           // relative paths resolve against the manifest file
  std::vector<std::string> subset_tags;  // at least one
};

struct DatasetManifest {
  std::string dataset_id;
  DatasetRole role = DatasetRole::Train;
  SensorKind sensor_kind = SensorKind::Lidar;
  std::vector<ManifestTile> tiles;
  std::filesystem::path class_map;  // optional; empty when tiles are born unified

  void validate() const;

  static DatasetManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Resolves a tile path against the manifest's own directory.
  std::filesystem::path resolve(const ManifestTile& tile) const;

  // Loads every referenced tile, checking existence and format integrity.
  std::vector<Tile> load_tiles() const;

 private:
  std::filesystem::path base_dir_;
};

}  // namespace apc
