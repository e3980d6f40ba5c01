#include "core/tile.hpp"

#include <cmath>
#include <unordered_set>

#include "core/error.hpp"

namespace apc {

const char* to_string(UnifiedClass c) {
  switch (c) {
    case UnifiedClass::Ground: return "Ground";
    case UnifiedClass::Building: return "Building";
    case UnifiedClass::Vegetation: return "Vegetation";
    case UnifiedClass::Undefined: return "Undefined";
  }
  return "?";
}

UnifiedClass unified_class_from_string(const std::string& name) {
  if (name == "Ground") return UnifiedClass::Ground;
  if (name == "Building") return UnifiedClass::Building;
  if (name == "Vegetation") return UnifiedClass::Vegetation;
  if (name == "Undefined") return UnifiedClass::Undefined;
  fail(ErrorCode::Parse, "unknown class category '" + name + "'");
}

const char* to_string(SensorKind k) {
  return k == SensorKind::Lidar ? "Lidar" : "Photogrammetry";
}

SensorKind sensor_kind_from_string(const std::string& name) {
  if (name == "Lidar") return SensorKind::Lidar;
  if (name == "Photogrammetry") return SensorKind::Photogrammetry;
  fail(ErrorCode::Parse, "unknown sensor kind '" + name + "'");
}

void RawCloud::validate() const {
  if (positions.empty()) fail(ErrorCode::InvalidArgument, "cloud has no points");
  if (labels.size() != positions.size())
    fail(ErrorCode::InvalidArgument, "label count does not match point count");
  if (rgb && rgb->size() != positions.size())
    fail(ErrorCode::InvalidArgument, "rgb count does not match point count");
  if (intensity && intensity->size() != positions.size())
    fail(ErrorCode::InvalidArgument, "intensity count does not match point count");
  for (size_t i = 0; i < positions.size(); ++i)
    if (!finite(positions[i]))
      fail(ErrorCode::InvalidArgument, "non-finite coordinate at point " + std::to_string(i));
}

void Tile::validate() const {
  if (positions.empty()) fail(ErrorCode::InvalidArgument, "tile has no points");
  if (labels.size() != positions.size())
    fail(ErrorCode::InvalidArgument, "unified label count does not match point count");
  if (rgb && rgb->size() != positions.size())
    fail(ErrorCode::InvalidArgument, "rgb count does not match point count");
  if (intensity && intensity->size() != positions.size())
    fail(ErrorCode::InvalidArgument, "intensity count does not match point count");
  for (size_t i = 0; i < positions.size(); ++i)
    if (!finite(positions[i]))
      fail(ErrorCode::InvalidArgument, "non-finite coordinate at point " + std::to_string(i));
  if (subset_tags.empty()) fail(ErrorCode::InvalidArgument, "tile carries no subset tags");
  if (!(overhead_density > 0.0))
    fail(ErrorCode::InvalidArgument, "overhead density must be positive");
  const double recomputed = compute_overhead_density(positions);
  if (std::abs(overhead_density - recomputed) > 1e-9 * recomputed)
    fail(ErrorCode::InvalidArgument, "stored overhead density disagrees with measurement");
}

bool Tile::operator==(const Tile& other) const {
  return positions == other.positions && labels == other.labels && rgb == other.rgb &&
         intensity == other.intensity && dataset_id == other.dataset_id &&
         subset_tags == other.subset_tags && sensor_kind == other.sensor_kind &&
         overhead_density == other.overhead_density;
}

double compute_overhead_density(const std::vector<Vec3>& positions) {
  if (positions.empty()) fail(ErrorCode::InvalidArgument, "density of an empty cloud");
  std::unordered_set<uint64_t> cells;
  cells.reserve(positions.size());
  for (const auto& p : positions) {
    const auto cx = static_cast<int64_t>(std::floor(p.x));
    const auto cy = static_cast<int64_t>(std::floor(p.y));
    const uint64_t key =
        (static_cast<uint64_t>(cx) << 32) ^ (static_cast<uint64_t>(cy) & 0xffffffffULL);
    cells.insert(key);
  }
  return static_cast<double>(positions.size()) / static_cast<double>(cells.size());
}

ClassCounts count_classes(const Tile& tile) {
  ClassCounts counts;
  for (const auto c : tile.labels) counts.add(c);
  return counts;
}

std::array<double, 3> class_weights(const ClassCounts& counts) {
  uint64_t total = 0;
  for (int i = 0; i < 3; ++i) {
    if (counts.scored[i] == 0)
      fail(ErrorCode::State, std::string("class weights undefined: no points of class ") +
                                 to_string(static_cast<UnifiedClass>(i)));
    total += counts.scored[i];
  }
  std::array<double, 3> inv{};
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double freq = static_cast<double>(counts.scored[i]) / static_cast<double>(total);
    inv[i] = 1.0 / freq;
    sum += inv[i];
  }
  for (auto& w : inv) w /= sum;
  return inv;
}

}  // namespace apc
