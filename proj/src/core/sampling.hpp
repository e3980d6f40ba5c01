#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/kdtree.hpp"
#include "core/rng.hpp"
#include "core/tile.hpp"

namespace apc {

// ---- density / radius / count algebra ----

// Highest achievable sample density: n points spread over a disk footprint
// of radius r, n / (pi * r^2).
double max_density(uint64_t n, double r);

// Point budget that realizes density d at radius r: round(d * pi * r^2),
// half away from zero. A budget of zero is an error.
uint64_t points_for_density(double d, double r);

// Enclosing radius of an n-point sample at uniform density d: sqrt(n/(pi*d)).
double radius_for_count(uint64_t n, double d);

// ---- sampling strategies ----

enum class Strategy : uint8_t { Naive = 0, ConstantRadius = 1, ConstantDensity = 2 };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct SamplerConfig {
  Strategy strategy = Strategy::Naive;
  uint64_t count = 0;       // N; used by Naive and ConstantRadius
  double radius = 0.0;      // r; used by ConstantRadius and ConstantDensity
  double density = 0.0;     // d; used by ConstantDensity
  double upsample_sigma = 0.05;  // isotropic noise on upsampled duplicates

  void validate() const;
  // Fixed output size of one sample under this configuration.
  uint64_t effective_count() const;
};

// Sentinel original_indices entry for synthesized (upsampled) points.
constexpr int64_t kSyntheticIndex = -1;

// A drawn point batch. Positions are stored relative to the origin point, so
// the origin sits at (0,0,0); `origin` keeps the absolute location.
struct Sample {
  std::vector<Vec3> positions;
  std::vector<UnifiedClass> labels;
  std::vector<int64_t> original_indices;
  std::vector<uint8_t> synthetic_mask;
  Vec3 origin;
  SamplerConfig config;

  size_t size() const { return positions.size(); }
  size_t synthetic_count() const;
};

struct UpsampleResult {
  std::vector<Vec3> positions;
  std::vector<uint32_t> parents;  // index into the real-point array
};

// Synthesizes target_count - real points: each is a uniformly chosen real
// point plus isotropic Gaussian noise of scale sigma, clamped to 2.5 sigma
// per axis so duplicates stay geometrically redundant.
UpsampleResult upsample_with_noise(std::span<const Vec3> real_points, size_t target_count,
                                   double sigma, Rng& rng);

// The n nearest neighbours of the origin point. Refuses tiles smaller than n.
Sample sample_naive(const Tile& tile, const KdTree& tree, uint32_t origin_index, uint64_t n,
                    Rng& rng);

// All points within r of the origin, randomly dropped or noisily upsampled to
// exactly n. An empty ball is an error.
Sample sample_constant_radius(const Tile& tile, const KdTree& tree, uint32_t origin_index,
                              double r, uint64_t n, Rng& rng,
                              double upsample_sigma = 0.05);

// Constant-radius sampling with n = points_for_density(d, r).
Sample sample_constant_density(const Tile& tile, const KdTree& tree, uint32_t origin_index,
                               double r, double d, Rng& rng, double upsample_sigma = 0.05);

Sample draw_sample(const Tile& tile, const KdTree& tree, uint32_t origin_index,
                   const SamplerConfig& config, Rng& rng);

// ---- training augmentations ----

enum class JitterKind : uint8_t { UniformPerAxis = 0, Gaussian = 1 };

struct AugmentOptions {
  bool shuffle = true;
  bool center = true;
  bool downsample = false;  // changes the point count; meant for naive samples
  bool rotate = true;
  bool jitter = true;
  JitterKind jitter_kind = JitterKind::UniformPerAxis;
  double jitter_amount = 0.5;     // per-axis bound (uniform) or sigma (gaussian)
  double downsample_min = 0.1;
  double downsample_max = 1.0;
};

// Individual steps, exposed so tests can drive them with explicit parameters.
void shuffle_points(Sample& sample, Rng& rng);
void center_points(Sample& sample);
void downsample_points(Sample& sample, double keep_fraction, Rng& rng);
void rotate_z(Sample& sample, double theta);
void jitter_points(Sample& sample, JitterKind kind, double amount, Rng& rng);

// shuffle -> center -> downsample -> rotate_z -> jitter, drawing parameters
// from rng only for the enabled stages.
Sample augment(Sample sample, Rng& rng, const AugmentOptions& options);

// ---- epoch scheduling ----

struct DatasetPointCounts {
  std::string dataset_id;
  std::vector<uint64_t> tile_point_counts;
};

struct ScheduleEntry {
  std::string dataset_id;
  uint32_t tile_index = 0;
  uint32_t origin_index = 0;
};

// Equal allocation across datasets; origins uniform over each dataset's
// points (tiles weighted by point count); globally shuffled order.
// samples_per_epoch must divide evenly by the dataset count.
std::vector<ScheduleEntry> epoch_schedule(const std::vector<DatasetPointCounts>& datasets,
                                          uint64_t samples_per_epoch, Rng& rng);

}  // namespace apc
