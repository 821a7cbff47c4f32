#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cardioreg/volume.hpp"

namespace cardioreg {

struct Mask {
  SpatialReference ref;
  std::vector<std::uint8_t> data;

  Mask() = default;
  explicit Mask(const SpatialReference& r) : ref(r), data(r.voxel_count(), 0) {}

  bool at(const Index3& idx) const { return data[ref.linear_index(idx)] != 0; }
  void set(const Index3& idx, bool v = true) { data[ref.linear_index(idx)] = v ? 1 : 0; }
  std::size_t count() const;
};

struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::optional<std::vector<double>> vertex_values;

  /// Throws InvalidData on out-of-range or repeated triangle indices.
  void validate() const;
};

enum class Connectivity { Six, TwentySix };

/// Seeded region growing with a running-mean intensity criterion: a neighbour
/// v joins when |v - M| <= threshold, then M <- (n M + v) / (n + 1).
/// Traversal is FIFO with neighbour order +i, -i, +j, -j, +k, -k (for 26-
/// connectivity: dk, dj, di each over -1, 0, +1, lexicographic).
Mask region_grow(const Volume& vol, std::span<const Index3> seeds, double threshold,
                 Connectivity connectivity = Connectivity::Six);

/// Closed, outward-oriented iso-0.5 surface of the mask indicator, padded by a
/// background layer. Cells are split into six tetrahedra sharing the main
/// diagonal, which keeps the surface crack-free and every edge shared by two
/// triangles.
TriMesh extract_isosurface(const Mask& mask);

/// World centres of set voxels with at least one unset or out-of-range
/// 6-neighbour, in ascending (k, j, i) order.
PointCloud mask_to_point_cloud(const Mask& mask);

}  // namespace cardioreg
