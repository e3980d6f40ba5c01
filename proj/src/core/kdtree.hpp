#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/geometry.hpp"

namespace apc {

// Immutable 3D index over a point set. Construction is deterministic:
// median split on the widest-spread axis, ties broken by original index,
// leaves hold at most kLeafSize points in ascending index order. Queries are
// exact and safe to run concurrently.
class KdTree {
 public:
  static constexpr size_t kLeafSize = 32;

  struct Node {
    Vec3 box_min, box_max;
    double split = 0.0;
    int32_t left = -1;   // -1 marks a leaf
    int32_t right = -1;
    uint32_t begin = 0;  // leaf range into the permutation
    uint32_t end = 0;
    uint8_t axis = 0;
  };

  explicit KdTree(std::vector<Vec3> positions);

  size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  // k nearest by Euclidean distance, ordered by nondecreasing distance;
  // equal distances order by smaller original index. 1 <= k <= size().
  std::vector<uint32_t> knn(const Vec3& query, size_t k) const;

  // All indices with distance <= r, ascending index order. r >= 0.
  std::vector<uint32_t> radius_query(const Vec3& query, double r) const;

  uint32_t nearest(const Vec3& query) const { return knn(query, 1)[0]; }

  // Structural access for invariant checks and determinism tests.
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const uint32_t> permutation() const { return perm_; }

 private:
  int32_t build(uint32_t begin, uint32_t end);

  std::vector<Vec3> points_;
  std::vector<uint32_t> perm_;
  std::vector<Node> nodes_;
};

}  // namespace apc
