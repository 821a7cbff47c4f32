#include "cardioreg/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace cardioreg {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const Point3> points) : points_(points) {
  if (points_.empty()) fail(ErrorCode::EmptyInput, "KdTree: no points");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (auto i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) {
    // All coincident: a leaf of any size is fine.
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }

  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = points_[a][axis];
                     const double vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  auto& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(std::uint32_t id, const Point3& q, Hit& best) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const auto idx = order_[i];
      const double d2 = squared_distance(points_[idx], q);
      if (d2 < best.squared_distance ||
          (d2 == best.squared_distance && idx < best.index)) {
        best = {idx, d2};
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = q[node.axis] - node.split;
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  search(near, q, best);
  // A point on the far side is at least |diff| away along this axis; equality
  // must still be explored so lower-index ties are found.
  if (diff * diff <= best.squared_distance) search(far, q, best);
}

void KdTree::collect(std::uint32_t id, const Point3& q, double r2,
                     std::vector<std::size_t>& out) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      if (squared_distance(points_[order_[i]], q) <= r2) out.push_back(order_[i]);
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  collect(near, q, r2, out);
  if (diff * diff <= r2) collect(far, q, r2, out);
}

void KdTree::within(const Point3& query, double squared_radius,
                    std::vector<std::size_t>& out) const {
  out.clear();
  collect(0, query, squared_radius, out);
  std::sort(out.begin(), out.end());
}

KdTree::Hit KdTree::nearest(const Point3& query) const {
  Hit best{std::numeric_limits<std::size_t>::max(),
           std::numeric_limits<double>::infinity()};
  search(0, query, best);
  return best;
}

}  // namespace cardioreg
