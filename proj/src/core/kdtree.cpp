#include "core/kdtree.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace apc {

namespace {

// Lower bound on the squared distance from q to any point inside the box.
// Accumulated in fixed x,y,z order; each axis term never exceeds the true
// per-axis offset of a contained point, so pruning on a strict comparison
// can never discard a valid candidate.
double box_dist2(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  double acc = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    double d = 0.0;
    if (q[axis] < lo[axis])
      d = lo[axis] - q[axis];
    else if (q[axis] > hi[axis])
      d = q[axis] - hi[axis];
    acc += d * d;
  }
  return acc;
}

struct Candidate {
  double d2;
  uint32_t index;
};

// true when a is a worse match than b (further, or equal distance with a
// larger original index).
bool worse(const Candidate& a, const Candidate& b) {
  if (a.d2 != b.d2) return a.d2 > b.d2;
  return a.index > b.index;
}

}  // namespace

KdTree::KdTree(std::vector<Vec3> positions) : points_(std::move(positions)) {
  if (points_.empty()) fail(ErrorCode::InvalidArgument, "cannot build a kd-tree from no points");
  for (size_t i = 0; i < points_.size(); ++i)
    if (!finite(points_[i]))
      fail(ErrorCode::InvalidArgument,
           "non-finite coordinate at point " + std::to_string(i));
  perm_.resize(points_.size());
  for (size_t i = 0; i < perm_.size(); ++i) perm_[i] = static_cast<uint32_t>(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<uint32_t>(points_.size()));
}

int32_t KdTree::build(uint32_t begin, uint32_t end) {
  const int32_t id = static_cast<int32_t>(nodes_.size());
  nodes_.emplace_back();

  Vec3 lo = points_[perm_[begin]];
  Vec3 hi = lo;
  for (uint32_t i = begin + 1; i < end; ++i) {
    const Vec3& p = points_[perm_[i]];
    for (int axis = 0; axis < 3; ++axis) {
      lo[axis] = std::min(lo[axis], p[axis]);
      hi[axis] = std::max(hi[axis], p[axis]);
    }
  }
  nodes_[id].box_min = lo;
  nodes_[id].box_max = hi;
  nodes_[id].begin = begin;
  nodes_[id].end = end;

  if (end - begin <= kLeafSize) {
    std::sort(perm_.begin() + begin, perm_.begin() + end);
    return id;
  }

  uint8_t axis = 0;
  double spread = hi.x - lo.x;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > spread) {
      spread = hi[a] - lo[a];
      axis = static_cast<uint8_t>(a);
    }
  }

  const uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](uint32_t a, uint32_t b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = points_[perm_[mid]][axis];

  const int32_t left = build(begin, mid);
  const int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<uint32_t> KdTree::knn(const Vec3& query, size_t k) const {
  if (k < 1 || k > points_.size())
    fail(ErrorCode::InvalidArgument, "knn k=" + std::to_string(k) + " out of range [1, " +
                                         std::to_string(points_.size()) + "]");

  std::vector<Candidate> heap;  // max-heap on `worse`: top() is the weakest kept match
  heap.reserve(k);

  const auto consider = [&](uint32_t index) {
    const Candidate c{dist2(query, points_[index]), index};
    if (heap.size() < k) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), [](const Candidate& a, const Candidate& b) {
        return worse(b, a);
      });
    } else if (worse(heap.front(), c)) {
      std::pop_heap(heap.begin(), heap.end(), [](const Candidate& a, const Candidate& b) {
        return worse(b, a);
      });
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end(), [](const Candidate& a, const Candidate& b) {
        return worse(b, a);
      });
    }
  };

  // Recursive descent, nearer child first.
  const auto visit = [&](auto&& self, int32_t node_id) -> void {
    const Node& node = nodes_[static_cast<size_t>(node_id)];
    if (node.left < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) consider(perm_[i]);
      return;
    }
    const Node& lchild = nodes_[static_cast<size_t>(node.left)];
    const Node& rchild = nodes_[static_cast<size_t>(node.right)];
    const double dl = box_dist2(query, lchild.box_min, lchild.box_max);
    const double dr = box_dist2(query, rchild.box_min, rchild.box_max);
    const int32_t first = dl <= dr ? node.left : node.right;
    const int32_t second = dl <= dr ? node.right : node.left;
    const double dfirst = dl <= dr ? dl : dr;
    const double dsecond = dl <= dr ? dr : dl;
    if (heap.size() < k || !(dfirst > heap.front().d2)) self(self, first);
    if (heap.size() < k || !(dsecond > heap.front().d2)) self(self, second);
  };
  visit(visit, 0);

  std::sort(heap.begin(), heap.end(), [](const Candidate& a, const Candidate& b) {
    return worse(b, a);
  });
  std::vector<uint32_t> result(heap.size());
  for (size_t i = 0; i < heap.size(); ++i) result[i] = heap[i].index;
  return result;
}

std::vector<uint32_t> KdTree::radius_query(const Vec3& query, double r) const {
  if (!(r >= 0.0) || !std::isfinite(r))
    fail(ErrorCode::InvalidArgument, "radius must be finite and nonnegative");
  const double r2 = r * r;
  std::vector<uint32_t> result;

  const auto visit = [&](auto&& self, int32_t node_id) -> void {
    const Node& node = nodes_[static_cast<size_t>(node_id)];
    if (box_dist2(query, node.box_min, node.box_max) > r2) return;
    if (node.left < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        const uint32_t index = perm_[i];
        if (dist2(query, points_[index]) <= r2) result.push_back(index);
      }
      return;
    }
    self(self, node.left);
    self(self, node.right);
  };
  visit(visit, 0);

  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace apc
