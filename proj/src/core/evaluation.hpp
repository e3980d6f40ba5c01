#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/tile.hpp"

namespace apc {

// 3x3 counts over {Ground, Building, Vegetation}; rows = truth, cols =
// prediction. Points with Undefined truth or a set exclusion flag are
// tallied in `excluded` and never touch the counts. Mergeable by addition.
struct ConfusionMatrix {
  std::array<std::array<uint64_t, 3>, 3> counts{};
  uint64_t excluded = 0;

  uint64_t scored_total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix& other) const = default;
};

// exclusion_mask may be empty (nothing excluded) or one flag per point.
void accumulate(ConfusionMatrix& cm, std::span<const UnifiedClass> truth,
                std::span<const UnifiedClass> predicted, std::span<const uint8_t> exclusion_mask);

// IoU_c = TP_c / (TP_c + FN_c + FP_c). A class absent from both truth and
// predictions has an undefined IoU and is dropped from means.
std::array<std::optional<double>, 3> iou_per_class(const ConfusionMatrix& cm);

enum class StdLevel : uint8_t { Dataset = 0, Subset = 1, Class = 2 };
const char* to_string(StdLevel level);
StdLevel std_level_from_string(const std::string& name);

struct EvalLeaf {
  std::string dataset_id;
  std::string subset;
  ConfusionMatrix matrix;
};

struct SubsetScore {
  std::string subset;
  std::array<std::optional<double>, 3> class_iou;
  std::optional<double> score;  // mean over present classes
};

struct DatasetScore {
  std::string dataset_id;
  SensorKind sensor_kind = SensorKind::Lidar;
  std::vector<SubsetScore> subsets;
  std::optional<double> score;  // mean over scored subsets
};

// Hierarchical mean-of-means: class -> subset -> dataset -> overall, with
// sensor-kind group means and a dispersion figure over dataset scores (or
// subset/class scores when std_level says so).
struct EvalReport {
  std::vector<EvalLeaf> leaves;
  std::vector<DatasetScore> datasets;
  std::optional<double> group_lidar;
  std::optional<double> group_photogrammetry;
  double overall = 0.0;
  double overall_std = 0.0;
  StdLevel std_level = StdLevel::Dataset;
  uint64_t seed = 0;
};

EvalReport aggregate(std::vector<EvalLeaf> leaves,
                     const std::map<std::string, SensorKind>& dataset_sensor,
                     StdLevel std_level = StdLevel::Dataset, uint64_t seed = 0);

enum class ReportFormat : uint8_t { Json = 0, Csv = 1, Table = 2 };
const char* to_string(ReportFormat format);
ReportFormat report_format_from_string(const std::string& name);

std::string render_report(const EvalReport& report, ReportFormat format);

// Rebuilds a report from its JSON rendering (leaves are authoritative; the
// tree is re-aggregated and must agree).
EvalReport report_from_json(const std::string& text);

}  // namespace apc
