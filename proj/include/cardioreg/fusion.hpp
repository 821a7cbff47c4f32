#pragma once

#include <variant>

#include "cardioreg/segmentation.hpp"

namespace cardioreg {

/// SPECT volume plus the transform mapping SPECT world into mesh world.
struct VolumeSource {
  Volume volume;
  AffineTransform3 transform;
};

struct FusionInput {
  TriMesh mesh;
  std::variant<PointCloud, VolumeSource> source;
};

/// Attaches a perfusion value to every mesh vertex: nearest registered point
/// (cloud source) or trilinear sample at t^-1(vertex), 0 outside (volume source).
TriMesh map_mpi_to_mesh(const FusionInput& input);

/// Dice similarity coefficient 2|A n B| / (|A| + |B|); 1 when both are empty.
double dice(const Mask& a, const Mask& b);

/// Mean nearest-neighbour distance, pairing each point of the smaller cloud
/// with its nearest point in the larger one (src drives on equal sizes).
double mean_distance_error(const PointCloud& src, const PointCloud& dst);

}  // namespace cardioreg
