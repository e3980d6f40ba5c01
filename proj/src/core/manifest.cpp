#include "core/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/tile_format.hpp"

namespace apc {

const char* to_string(DatasetRole role) {
  switch (role) {
    case DatasetRole::Train: return "Train";
    case DatasetRole::Validation: return "Validation";
    case DatasetRole::Test: return "Test";
  }
  return "?";
}

DatasetRole dataset_role_from_string(const std::string& name) {
  if (name == "Train") return DatasetRole::Train;
  if (name == "Validation") return DatasetRole::Validation;
  if (name == "Test") return DatasetRole::Test;
  fail(ErrorCode::Parse, "unknown dataset role '" + name + "'");
}

void DatasetManifest::validate() const {
  if (dataset_id.empty()) fail(ErrorCode::Parse, "manifest has no dataset_id");
  if (tiles.empty()) fail(ErrorCode::Parse, "manifest '" + dataset_id + "' lists no tiles");
  for (const auto& tile : tiles) {
    if (tile.subset_tags.empty())
      fail(ErrorCode::Parse, "manifest '" + dataset_id + "': tile '" + tile.path.string() +
                                 "' carries no subset tags");
  }
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  DatasetManifest manifest;
  try {
    manifest.dataset_id = doc.at("dataset_id").get<std::string>();
    manifest.role = dataset_role_from_string(doc.at("role").get<std::string>());
    manifest.sensor_kind = sensor_kind_from_string(doc.at("sensor_kind").get<std::string>());
    for (const auto& entry : doc.at("tiles")) {
      ManifestTile tile;
      tile.path = entry.at("path").get<std::string>();
      tile.subset_tags = entry.at("subset_tags").get<std::vector<std::string>>();
      manifest.tiles.push_back(std::move(tile));
    }
    if (doc.contains("class_map") && !doc["class_map"].is_null())
      manifest.class_map = doc["class_map"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "manifest '" + path.string() + "' malformed: " + e.what());
  }
  manifest.base_dir_ = path.parent_path();
  manifest.validate();
  return manifest;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
  validate();
  nlohmann::ordered_json doc;
  doc["dataset_id"] = dataset_id;
  doc["role"] = to_string(role);
  doc["sensor_kind"] = to_string(sensor_kind);
  auto tiles_doc = nlohmann::ordered_json::array();
  for (const auto& tile : tiles) {
    nlohmann::ordered_json entry;
    entry["path"] = tile.path.generic_string();
    entry["subset_tags"] = tile.subset_tags;
    tiles_doc.push_back(entry);
  }
  doc["tiles"] = tiles_doc;
  if (!class_map.empty()) doc["class_map"] = class_map.generic_string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write manifest '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

std::filesystem::path DatasetManifest::resolve(const ManifestTile& tile) const {
  if (tile.path.is_absolute()) return tile.path;
  return base_dir_ / tile.path;
}

std::vector<Tile> DatasetManifest::load_tiles() const {
  validate();
  std::vector<Tile> loaded;
  loaded.reserve(tiles.size());
  for (const auto& entry : tiles) {
    const auto path = resolve(entry);
    if (!std::filesystem::exists(path))
      fail(ErrorCode::Io,
           "manifest '" + dataset_id + "' references missing tile '" + path.string() + "'");
    loaded.push_back(read_tile(path));
  }
  return loaded;
}

}  // namespace apc
