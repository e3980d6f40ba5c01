#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace apc {

enum class UnifiedClass : uint8_t {
  Ground = 0,
  Building = 1,
  Vegetation = 2,
  Undefined = 3,
};

constexpr int kNumScoredClasses = 3;  // Ground, Building, Vegetation

const char* to_string(UnifiedClass c);
UnifiedClass unified_class_from_string(const std::string& name);

enum class SensorKind : uint8_t {
  Lidar = 0,
  Photogrammetry = 1,
};

const char* to_string(SensorKind k);
SensorKind sensor_kind_from_string(const std::string& name);

// Source-vocabulary code carried by points that arrive without labels.
// remap_labels maps it to Undefined without needing a class-map entry.
constexpr int32_t kUnlabeledCode = -1;

// A point cloud as ingested, labels still in the source vocabulary.
struct RawCloud {
  std::vector<Vec3> positions;
  std::vector<int32_t> labels;                           // same length as positions
  std::optional<std::vector<std::array<uint8_t, 3>>> rgb;
  std::optional<std::vector<float>> intensity;
  std::string source_vocab_id;

  size_t size() const { return positions.size(); }
  void validate() const;
};

// One homogenized tile: unified labels, optional channels, density metadata.
struct Tile {
  std::vector<Vec3> positions;
  std::vector<UnifiedClass> labels;
  std::optional<std::vector<std::array<uint8_t, 3>>> rgb;
  std::optional<std::vector<float>> intensity;
  std::string dataset_id;
  std::vector<std::string> subset_tags;
  SensorKind sensor_kind = SensorKind::Lidar;
  double overhead_density = 0.0;

  size_t size() const { return positions.size(); }
  void validate() const;

  bool operator==(const Tile& other) const;
};

// Points per square meter of occupied footprint, where the footprint is the
// number of distinct 1m x 1m xy grid cells containing at least one point.
double compute_overhead_density(const std::vector<Vec3>& positions);
inline double compute_overhead_density(const Tile& tile) {
  return compute_overhead_density(tile.positions);
}

// Per-class point counts; Undefined tracked separately from the scored three.
struct ClassCounts {
  std::array<uint64_t, 3> scored{0, 0, 0};  // indexed by UnifiedClass value
  uint64_t undefined = 0;

  void add(UnifiedClass c) {
    if (c == UnifiedClass::Undefined)
      ++undefined;
    else
      ++scored[static_cast<size_t>(c)];
  }
  ClassCounts& operator+=(const ClassCounts& o) {
    for (int i = 0; i < 3; ++i) scored[i] += o.scored[i];
    undefined += o.undefined;
    return *this;
  }
};

ClassCounts count_classes(const Tile& tile);

// Normalized inverse-occurrence weights over {Ground, Building, Vegetation}:
// w_c = (1/f_c) / sum_k (1/f_k). Throws if any scored class has zero points.
std::array<double, 3> class_weights(const ClassCounts& counts);

}  // namespace apc
