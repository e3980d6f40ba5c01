#include "core/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace apc {

double max_density(uint64_t n, double r) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "max_density requires n >= 1");
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "max_density requires r > 0");
  return static_cast<double>(n) / (std::numbers::pi * r * r);
}

uint64_t points_for_density(double d, double r) {
  if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "points_for_density requires d > 0");
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "points_for_density requires r > 0");
  const long long n = std::llround(d * std::numbers::pi * r * r);
  if (n < 1)
    fail(ErrorCode::InvalidArgument, "density " + std::to_string(d) + " at radius " +
                                         std::to_string(r) + " rounds to zero points");
  return static_cast<uint64_t>(n);
}

double radius_for_count(uint64_t n, double d) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "radius_for_count requires n >= 1");
  if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "radius_for_count requires d > 0");
  return std::sqrt(static_cast<double>(n) / (std::numbers::pi * d));
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Naive: return "naive";
    case Strategy::ConstantRadius: return "constant-radius";
    case Strategy::ConstantDensity: return "constant-density";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "naive") return Strategy::Naive;
  if (name == "constant-radius") return Strategy::ConstantRadius;
  if (name == "constant-density") return Strategy::ConstantDensity;
  fail(ErrorCode::Parse, "unknown sampling strategy '" + name + "'");
}

void SamplerConfig::validate() const {
  switch (strategy) {
    case Strategy::Naive:
      if (count < 1) fail(ErrorCode::InvalidArgument, "naive sampling requires N >= 1");
      break;
    case Strategy::ConstantRadius:
      if (count < 1) fail(ErrorCode::InvalidArgument, "constant-radius sampling requires N >= 1");
      if (!(radius > 0.0))
        fail(ErrorCode::InvalidArgument, "constant-radius sampling requires r > 0");
      break;
    case Strategy::ConstantDensity:
      if (!(radius > 0.0))
        fail(ErrorCode::InvalidArgument, "constant-density sampling requires r > 0");
      if (!(density > 0.0))
        fail(ErrorCode::InvalidArgument, "constant-density sampling requires d > 0");
      points_for_density(density, radius);  // must be >= 1
      break;
  }
  if (!(upsample_sigma >= 0.0))
    fail(ErrorCode::InvalidArgument, "upsample sigma must be nonnegative");
}

uint64_t SamplerConfig::effective_count() const {
  return strategy == Strategy::ConstantDensity ? points_for_density(density, radius) : count;
}

size_t Sample::synthetic_count() const {
  size_t n = 0;
  for (const auto flag : synthetic_mask) n += flag ? 1 : 0;
  return n;
}

UpsampleResult upsample_with_noise(std::span<const Vec3> real_points, size_t target_count,
                                   double sigma, Rng& rng) {
  if (real_points.empty())
    fail(ErrorCode::InvalidArgument, "cannot upsample without real points");
  if (target_count <= real_points.size())
    fail(ErrorCode::InvalidArgument, "upsample target must exceed the real point count");
  const size_t extra = target_count - real_points.size();
  UpsampleResult result;
  result.positions.reserve(extra);
  result.parents.reserve(extra);
  const double clamp = 2.5 * sigma;
  for (size_t i = 0; i < extra; ++i) {
    const auto parent = static_cast<uint32_t>(rng.bounded(real_points.size()));
    Vec3 noise = rng.normal3() * sigma;
    for (int axis = 0; axis < 3; ++axis)
      noise[axis] = std::clamp(noise[axis], -clamp, clamp);
    result.positions.push_back(real_points[parent] + noise);
    result.parents.push_back(parent);
  }
  return result;
}

namespace {

SamplerConfig naive_config(uint64_t n) {
  SamplerConfig config;
  config.strategy = Strategy::Naive;
  config.count = n;
  return config;
}

void check_origin(const Tile& tile, uint32_t origin_index) {
  if (origin_index >= tile.size())
    fail(ErrorCode::InvalidArgument, "origin index " + std::to_string(origin_index) +
                                         " out of range for tile of " +
                                         std::to_string(tile.size()) + " points");
}

}  // namespace

Sample sample_naive(const Tile& tile, const KdTree& tree, uint32_t origin_index, uint64_t n,
                    Rng& rng) {
  (void)rng;  // naive sampling is deterministic; parameter kept for signature parity
  check_origin(tile, origin_index);
  if (n < 1) fail(ErrorCode::InvalidArgument, "naive sampling requires N >= 1");
  if (n > tile.size())
    fail(ErrorCode::InvalidArgument, "naive sample of " + std::to_string(n) +
                                         " points exceeds tile size " +
                                         std::to_string(tile.size()));
  const Vec3 origin = tile.positions[origin_index];
  const auto indices = tree.knn(origin, n);

  Sample sample;
  sample.origin = origin;
  sample.config = naive_config(n);
  sample.positions.reserve(n);
  sample.labels.reserve(n);
  sample.original_indices.reserve(n);
  sample.synthetic_mask.assign(n, 0);
  for (const uint32_t index : indices) {
    sample.positions.push_back(tile.positions[index] - origin);
    sample.labels.push_back(tile.labels[index]);
    sample.original_indices.push_back(index);
  }
  return sample;
}

Sample sample_constant_radius(const Tile& tile, const KdTree& tree, uint32_t origin_index,
                              double r, uint64_t n, Rng& rng, double upsample_sigma) {
  check_origin(tile, origin_index);
  if (n < 1) fail(ErrorCode::InvalidArgument, "constant-radius sampling requires N >= 1");
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "constant-radius sampling requires r > 0");
  const Vec3 origin = tile.positions[origin_index];
  std::vector<uint32_t> ball = tree.radius_query(origin, r);
  if (ball.empty()) fail(ErrorCode::State, "empty sample region at origin index " +
                                               std::to_string(origin_index));

  if (ball.size() > n) {
    // Random drop: uniform subset, kept in ascending original-index order.
    const auto chosen = rng.sample_without_replacement(ball.size(), static_cast<size_t>(n));
    std::vector<uint32_t> kept;
    kept.reserve(chosen.size());
    for (const uint32_t slot : chosen) kept.push_back(ball[slot]);
    ball = std::move(kept);
  }

  Sample sample;
  sample.origin = origin;
  sample.config.strategy = Strategy::ConstantRadius;
  sample.config.count = n;
  sample.config.radius = r;
  sample.config.upsample_sigma = upsample_sigma;
  sample.positions.reserve(n);
  sample.labels.reserve(n);
  sample.original_indices.reserve(n);
  sample.synthetic_mask.reserve(n);
  for (const uint32_t index : ball) {
    sample.positions.push_back(tile.positions[index] - origin);
    sample.labels.push_back(tile.labels[index]);
    sample.original_indices.push_back(index);
    sample.synthetic_mask.push_back(0);
  }
  if (ball.size() < n) {
    const auto synth =
        upsample_with_noise(std::span<const Vec3>(sample.positions.data(), ball.size()),
                            static_cast<size_t>(n), upsample_sigma, rng);
    for (size_t i = 0; i < synth.positions.size(); ++i) {
      sample.positions.push_back(synth.positions[i]);
      sample.labels.push_back(sample.labels[synth.parents[i]]);
      sample.original_indices.push_back(kSyntheticIndex);
      sample.synthetic_mask.push_back(1);
    }
  }
  return sample;
}

Sample sample_constant_density(const Tile& tile, const KdTree& tree, uint32_t origin_index,
                               double r, double d, Rng& rng, double upsample_sigma) {
  const uint64_t n = points_for_density(d, r);
  Sample sample = sample_constant_radius(tile, tree, origin_index, r, n, rng, upsample_sigma);
  sample.config.strategy = Strategy::ConstantDensity;
  sample.config.density = d;
  return sample;
}

Sample draw_sample(const Tile& tile, const KdTree& tree, uint32_t origin_index,
                   const SamplerConfig& config, Rng& rng) {
  config.validate();
  switch (config.strategy) {
    case Strategy::Naive:
      return sample_naive(tile, tree, origin_index, config.count, rng);
    case Strategy::ConstantRadius:
      return sample_constant_radius(tile, tree, origin_index, config.radius, config.count, rng,
                                    config.upsample_sigma);
    case Strategy::ConstantDensity:
      return sample_constant_density(tile, tree, origin_index, config.radius, config.density, rng,
                                     config.upsample_sigma);
  }
  fail(ErrorCode::Internal, "unreachable sampling strategy");
}

void shuffle_points(Sample& sample, Rng& rng) {
  const auto perm = rng.permutation(sample.size());
  Sample shuffled = sample;
  for (size_t i = 0; i < perm.size(); ++i) {
    shuffled.positions[i] = sample.positions[perm[i]];
    shuffled.labels[i] = sample.labels[perm[i]];
    shuffled.original_indices[i] = sample.original_indices[perm[i]];
    shuffled.synthetic_mask[i] = sample.synthetic_mask[perm[i]];
  }
  sample = std::move(shuffled);
}

void center_points(Sample& sample) {
  if (sample.positions.empty()) fail(ErrorCode::InvalidArgument, "cannot center an empty sample");
  Vec3 sum{0, 0, 0};
  for (const auto& p : sample.positions) sum = sum + p;
  const Vec3 mean = sum * (1.0 / static_cast<double>(sample.size()));
  for (auto& p : sample.positions) p = p - mean;
}

void downsample_points(Sample& sample, double keep_fraction, Rng& rng) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    fail(ErrorCode::InvalidArgument, "downsample fraction must be in (0, 1]");
  const size_t n = sample.size();
  const size_t keep = std::max<size_t>(
      1, static_cast<size_t>(std::llround(keep_fraction * static_cast<double>(n))));
  if (keep >= n) return;
  const auto chosen = rng.sample_without_replacement(n, keep);
  Sample reduced;
  reduced.origin = sample.origin;
  reduced.config = sample.config;
  reduced.positions.reserve(keep);
  reduced.labels.reserve(keep);
  reduced.original_indices.reserve(keep);
  reduced.synthetic_mask.reserve(keep);
  for (const uint32_t i : chosen) {
    reduced.positions.push_back(sample.positions[i]);
    reduced.labels.push_back(sample.labels[i]);
    reduced.original_indices.push_back(sample.original_indices[i]);
    reduced.synthetic_mask.push_back(sample.synthetic_mask[i]);
  }
  sample = std::move(reduced);
}

void rotate_z(Sample& sample, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (auto& p : sample.positions) {
    const double x = p.x;
    const double y = p.y;
    p.x = c * x - s * y;
    p.y = s * x + c * y;
  }
}

void jitter_points(Sample& sample, JitterKind kind, double amount, Rng& rng) {
  if (!(amount >= 0.0)) fail(ErrorCode::InvalidArgument, "jitter amount must be nonnegative");
  for (auto& p : sample.positions) {
    for (int axis = 0; axis < 3; ++axis) {
      const double delta = kind == JitterKind::UniformPerAxis ? rng.uniform(-amount, amount)
                                                              : rng.normal() * amount;
      p[axis] += delta;
    }
  }
}

Sample augment(Sample sample, Rng& rng, const AugmentOptions& options) {
  if (sample.positions.empty()) fail(ErrorCode::InvalidArgument, "cannot augment an empty sample");
  if (options.shuffle) shuffle_points(sample, rng);
  if (options.center) center_points(sample);
  if (options.downsample) {
    const double fraction = rng.uniform(options.downsample_min, options.downsample_max);
    downsample_points(sample, fraction, rng);
  }
  if (options.rotate) rotate_z(sample, rng.uniform(0.0, 2.0 * std::numbers::pi));
  if (options.jitter) jitter_points(sample, options.jitter_kind, options.jitter_amount, rng);
  return sample;
}

std::vector<ScheduleEntry> epoch_schedule(const std::vector<DatasetPointCounts>& datasets,
                                          uint64_t samples_per_epoch, Rng& rng) {
  if (datasets.empty()) fail(ErrorCode::InvalidArgument, "no training datasets");
  if (samples_per_epoch == 0) fail(ErrorCode::InvalidArgument, "samples_per_epoch must be >= 1");
  if (samples_per_epoch % datasets.size() != 0)
    fail(ErrorCode::InvalidArgument,
         std::to_string(samples_per_epoch) + " samples cannot be split equally across " +
             std::to_string(datasets.size()) + " datasets");
  const uint64_t per_dataset = samples_per_epoch / datasets.size();

  std::vector<ScheduleEntry> schedule;
  schedule.reserve(samples_per_epoch);
  for (const auto& dataset : datasets) {
    uint64_t total = 0;
    for (const auto count : dataset.tile_point_counts) total += count;
    if (total == 0)
      fail(ErrorCode::InvalidArgument, "dataset '" + dataset.dataset_id + "' has no points");
    for (uint64_t s = 0; s < per_dataset; ++s) {
      uint64_t draw = rng.bounded(total);
      uint32_t tile_index = 0;
      while (draw >= dataset.tile_point_counts[tile_index]) {
        draw -= dataset.tile_point_counts[tile_index];
        ++tile_index;
      }
      schedule.push_back(
          {dataset.dataset_id, tile_index, static_cast<uint32_t>(draw)});
    }
  }
  const auto perm = rng.permutation(schedule.size());
  std::vector<ScheduleEntry> shuffled;
  shuffled.reserve(schedule.size());
  for (const uint32_t i : perm) shuffled.push_back(std::move(schedule[i]));
  return shuffled;
}

}  // namespace apc
