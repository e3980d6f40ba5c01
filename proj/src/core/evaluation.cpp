#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace apc {

uint64_t ConfusionMatrix::scored_total() const {
  uint64_t total = 0;
  for (const auto& row : counts)
    for (const auto v : row) total += v;
  return total;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p) counts[t][p] += other.counts[t][p];
  excluded += other.excluded;
  return *this;
}

void accumulate(ConfusionMatrix& cm, std::span<const UnifiedClass> truth,
                std::span<const UnifiedClass> predicted, std::span<const uint8_t> exclusion_mask) {
  if (truth.size() != predicted.size())
    fail(ErrorCode::InvalidArgument, "truth and prediction lengths differ");
  if (!exclusion_mask.empty() && exclusion_mask.size() != truth.size())
    fail(ErrorCode::InvalidArgument, "exclusion mask length differs from labels");
  for (size_t i = 0; i < truth.size(); ++i) {
    const bool masked = !exclusion_mask.empty() && exclusion_mask[i] != 0;
    if (masked || truth[i] == UnifiedClass::Undefined) {
      ++cm.excluded;
      continue;
    }
    if (predicted[i] == UnifiedClass::Undefined)
      fail(ErrorCode::InvalidArgument,
           "prediction Undefined at point " + std::to_string(i) + "; models never emit it");
    ++cm.counts[static_cast<size_t>(truth[i])][static_cast<size_t>(predicted[i])];
  }
}

std::array<std::optional<double>, 3> iou_per_class(const ConfusionMatrix& cm) {
  std::array<std::optional<double>, 3> iou;
  for (int c = 0; c < 3; ++c) {
    const uint64_t tp = cm.counts[c][c];
    uint64_t fn = 0, fp = 0;
    for (int o = 0; o < 3; ++o) {
      if (o == c) continue;
      fn += cm.counts[c][o];
      fp += cm.counts[o][c];
    }
    const uint64_t denom = tp + fn + fp;
    if (denom > 0) iou[c] = static_cast<double>(tp) / static_cast<double>(denom);
  }
  return iou;
}

const char* to_string(StdLevel level) {
  switch (level) {
    case StdLevel::Dataset: return "dataset";
    case StdLevel::Subset: return "subset";
    case StdLevel::Class: return "class";
  }
  return "?";
}

StdLevel std_level_from_string(const std::string& name) {
  if (name == "dataset") return StdLevel::Dataset;
  if (name == "subset") return StdLevel::Subset;
  if (name == "class") return StdLevel::Class;
  fail(ErrorCode::Parse, "unknown std level '" + name + "'");
}

namespace {

std::optional<double> mean_of_present(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double population_std(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace

EvalReport aggregate(std::vector<EvalLeaf> leaves,
                     const std::map<std::string, SensorKind>& dataset_sensor, StdLevel std_level,
                     uint64_t seed) {
  if (leaves.empty()) fail(ErrorCode::InvalidArgument, "cannot aggregate an empty report");
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& leaf : leaves) {
    if (!seen.insert({leaf.dataset_id, leaf.subset}).second)
      fail(ErrorCode::InvalidArgument, "duplicate evaluation leaf for dataset '" +
                                           leaf.dataset_id + "' subset '" + leaf.subset + "'");
    if (!dataset_sensor.count(leaf.dataset_id))
      fail(ErrorCode::InvalidArgument,
           "no sensor kind recorded for dataset '" + leaf.dataset_id + "'");
  }

  // Stable hierarchy order: datasets and subsets sorted by name.
  std::sort(leaves.begin(), leaves.end(), [](const EvalLeaf& a, const EvalLeaf& b) {
    if (a.dataset_id != b.dataset_id) return a.dataset_id < b.dataset_id;
    return a.subset < b.subset;
  });

  EvalReport report;
  report.std_level = std_level;
  report.seed = seed;

  for (const auto& leaf : leaves) {
    if (report.datasets.empty() || report.datasets.back().dataset_id != leaf.dataset_id) {
      DatasetScore ds;
      ds.dataset_id = leaf.dataset_id;
      ds.sensor_kind = dataset_sensor.at(leaf.dataset_id);
      report.datasets.push_back(std::move(ds));
    }
    SubsetScore subset;
    subset.subset = leaf.subset;
    subset.class_iou = iou_per_class(leaf.matrix);
    subset.score = mean_of_present(
        {subset.class_iou[0], subset.class_iou[1], subset.class_iou[2]});
    report.datasets.back().subsets.push_back(std::move(subset));
  }

  for (auto& dataset : report.datasets) {
    std::vector<std::optional<double>> subset_scores;
    for (const auto& subset : dataset.subsets) subset_scores.push_back(subset.score);
    dataset.score = mean_of_present(subset_scores);
  }

  std::vector<double> dataset_scores;
  std::vector<double> lidar_scores, photo_scores;
  for (const auto& dataset : report.datasets) {
    if (!dataset.score) continue;
    dataset_scores.push_back(*dataset.score);
    (dataset.sensor_kind == SensorKind::Lidar ? lidar_scores : photo_scores)
        .push_back(*dataset.score);
  }
  if (dataset_scores.empty())
    fail(ErrorCode::State, "report is empty after exclusions: no dataset has a scored class");

  double overall = 0.0;
  for (const double s : dataset_scores) overall += s;
  report.overall = overall / static_cast<double>(dataset_scores.size());
  if (!lidar_scores.empty()) {
    double g = 0.0;
    for (const double s : lidar_scores) g += s;
    report.group_lidar = g / static_cast<double>(lidar_scores.size());
  }
  if (!photo_scores.empty()) {
    double g = 0.0;
    for (const double s : photo_scores) g += s;
    report.group_photogrammetry = g / static_cast<double>(photo_scores.size());
  }

  std::vector<double> spread_values;
  switch (std_level) {
    case StdLevel::Dataset: spread_values = dataset_scores; break;
    case StdLevel::Subset:
      for (const auto& dataset : report.datasets)
        for (const auto& subset : dataset.subsets)
          if (subset.score) spread_values.push_back(*subset.score);
      break;
    case StdLevel::Class:
      for (const auto& dataset : report.datasets)
        for (const auto& subset : dataset.subsets)
          for (const auto& iou : subset.class_iou)
            if (iou) spread_values.push_back(*iou);
      break;
  }
  report.overall_std = population_std(spread_values);
  report.leaves = std::move(leaves);
  return report;
}

const char* to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Table: return "table";
  }
  return "?";
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "table") return ReportFormat::Table;
  fail(ErrorCode::InvalidArgument, "unknown report format '" + name + "'");
}

namespace {

std::string format_score(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

nlohmann::ordered_json score_or_null(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

std::string render_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["seed"] = report.seed;
  auto leaves = nlohmann::ordered_json::array();
  for (const auto& leaf : report.leaves) {
    nlohmann::ordered_json entry;
    entry["dataset"] = leaf.dataset_id;
    entry["subset"] = leaf.subset;
    entry["matrix"] = leaf.matrix.counts;
    entry["excluded"] = leaf.matrix.excluded;
    leaves.push_back(entry);
  }
  doc["leaves"] = leaves;

  nlohmann::ordered_json datasets = nlohmann::ordered_json::object();
  for (const auto& dataset : report.datasets) {
    nlohmann::ordered_json node;
    node["score"] = score_or_null(dataset.score);
    node["sensor_kind"] = to_string(dataset.sensor_kind);
    nlohmann::ordered_json subsets = nlohmann::ordered_json::object();
    for (const auto& subset : dataset.subsets) {
      nlohmann::ordered_json sub;
      sub["score"] = score_or_null(subset.score);
      nlohmann::ordered_json classes = nlohmann::ordered_json::object();
      for (int c = 0; c < 3; ++c)
        classes[to_string(static_cast<UnifiedClass>(c))] = score_or_null(subset.class_iou[c]);
      sub["classes"] = classes;
      subsets[subset.subset] = sub;
    }
    node["subsets"] = subsets;
    datasets[dataset.dataset_id] = node;
  }
  doc["tree"] = nlohmann::ordered_json{{"datasets", datasets}};
  doc["groups"] = {{"lidar", score_or_null(report.group_lidar)},
                   {"photogrammetry", score_or_null(report.group_photogrammetry)}};
  doc["overall"] = report.overall;
  doc["overall_std"] = report.overall_std;
  doc["std_level"] = to_string(report.std_level);
  return doc.dump(2) + "\n";
}

std::string render_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "dataset,subset,class,iou,level\n";
  for (const auto& dataset : report.datasets) {
    for (const auto& subset : dataset.subsets) {
      for (int c = 0; c < 3; ++c) {
        if (!subset.class_iou[c]) continue;
        out << dataset.dataset_id << ',' << subset.subset << ','
            << to_string(static_cast<UnifiedClass>(c)) << ','
            << format_score(*subset.class_iou[c]) << ",class\n";
      }
      if (subset.score)
        out << dataset.dataset_id << ',' << subset.subset << ",,"
            << format_score(*subset.score) << ",subset\n";
    }
    if (dataset.score)
      out << dataset.dataset_id << ",,," << format_score(*dataset.score) << ",dataset\n";
  }
  if (report.group_lidar)
    out << "lidar,,," << format_score(*report.group_lidar) << ",group\n";
  if (report.group_photogrammetry)
    out << "photogrammetry,,," << format_score(*report.group_photogrammetry) << ",group\n";
  out << ",,," << format_score(report.overall) << ",overall\n";
  out << ",,," << format_score(report.overall_std) << ",overall_std\n";
  return out.str();
}

std::string render_table(const EvalReport& report) {
  std::ostringstream out;
  const auto line = [&](const std::string& label, const std::optional<double>& value) {
    out << "  " << label;
    for (size_t i = label.size(); i < 44; ++i) out << ' ';
    if (value)
      out << format_score(*value);
    else
      out << "-";
    out << '\n';
  };
  out << "mean IoU by dataset / subset\n";
  for (const auto& dataset : report.datasets) {
    line(dataset.dataset_id + " [" + to_string(dataset.sensor_kind) + "]", dataset.score);
    for (const auto& subset : dataset.subsets) {
      line("  " + subset.subset, subset.score);
      for (int c = 0; c < 3; ++c)
        if (subset.class_iou[c])
          line(std::string("    ") + to_string(static_cast<UnifiedClass>(c)),
               subset.class_iou[c]);
    }
  }
  out << "groups\n";
  line("Overall LIDAR", report.group_lidar);
  line("Overall Photogrammetry", report.group_photogrammetry);
  line("Overall", report.overall);
  line(std::string("Overall (STD, ") + to_string(report.std_level) + " level)",
       report.overall_std);
  return out.str();
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Table: return render_table(report);
  }
  fail(ErrorCode::Internal, "unreachable report format");
}

EvalReport report_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    std::vector<EvalLeaf> leaves;
    for (const auto& entry : doc.at("leaves")) {
      EvalLeaf leaf;
      leaf.dataset_id = entry.at("dataset").get<std::string>();
      leaf.subset = entry.at("subset").get<std::string>();
      leaf.matrix.counts = entry.at("matrix").get<std::array<std::array<uint64_t, 3>, 3>>();
      leaf.matrix.excluded = entry.at("excluded").get<uint64_t>();
      leaves.push_back(std::move(leaf));
    }
    std::map<std::string, SensorKind> sensors;
    for (const auto& [id, node] : doc.at("tree").at("datasets").items())
      sensors[id] = sensor_kind_from_string(node.at("sensor_kind").get<std::string>());
    const auto std_level = std_level_from_string(doc.at("std_level").get<std::string>());
    const auto seed = doc.at("seed").get<uint64_t>();
    return aggregate(std::move(leaves), sensors, std_level, seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("report JSON malformed: ") + e.what());
  }
}

}  // namespace apc
