#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cardioreg/core.hpp"

namespace cardioreg {

/// Static 3-d tree over a borrowed point array. Queries are exact; among
/// equidistant candidates the lowest original index wins, so results match an
/// exhaustive scan bit for bit.
class KdTree {
 public:
  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };

  explicit KdTree(std::span<const Point3> points);

  Hit nearest(const Point3& query) const;
  /// Indices of all points with squared distance <= squared_radius, ascending.
  void within(const Point3& query, double squared_radius, std::vector<std::size_t>& out) const;
  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    // Leaf when axis < 0: [begin, end) into order_.
    std::int32_t axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::uint32_t node, const Point3& q, Hit& best) const;
  void collect(std::uint32_t node, const Point3& q, double r2,
               std::vector<std::size_t>& out) const;

  std::span<const Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Squared Euclidean distance with a fixed evaluation order; the tree and all
/// exhaustive oracles share it so ties compare identically.
inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace cardioreg
