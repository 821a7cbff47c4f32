#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cardioreg/coarse.hpp"
#include "cardioreg/volume.hpp"

namespace cardioreg {

/// Truncated ellipsoid standing in for a left-ventricular epicardial surface.
/// Long axis is z; the apex sits at z = -c and the open base is cut at
/// z = -c + 2c * truncation_fraction.
struct ShellParams {
  Eigen::Vector3d semi_axes{25.0, 22.0, 40.0};
  double truncation_fraction = 0.8;
  int point_count = 2000;
  std::uint64_t rng_seed = 1;
  /// Points per groove polyline.
  int landmark_count = 12;

  void validate() const;
};

struct PerturbSpec {
  AffineTransform3 transform;
  double noise_sigma = 0.0;
  double outlier_fraction = 0.0;
  std::uint64_t rng_seed = 1;
};

struct EllipsoidShell {
  Point3 center = Point3::Zero();
  Eigen::Vector3d semi_axes = Eigen::Vector3d::Ones();
  float intensity = 1.0f;
};

/// Area-uniform seeded sampling of the truncated surface plus two groove
/// polylines (anterior at azimuth 0, posterior at azimuth pi), each ordered
/// base to apex.
std::pair<PointCloud, LandmarkSet> generate_lv_shell(const ShellParams& params);

/// Transform, then per-axis Gaussian noise on points and landmarks, then a
/// fraction of cloud points (never landmarks) replaced by uniform samples in
/// the cloud's bounding box inflated by 20%.
std::pair<PointCloud, LandmarkSet> perturb_cloud(const PointCloud& cloud,
                                                 const LandmarkSet& landmarks,
                                                 const PerturbSpec& spec);

/// Voxel value is the intensity of the smallest ellipsoid containing the voxel
/// centre, or 0.
Volume generate_phantom_volume(const SpatialReference& ref,
                               const std::vector<EllipsoidShell>& shells);

struct SimilarityRange {
  double max_rotation_deg = 30.0;
  double scale_min = 0.7;
  double scale_max = 1.4;
  double max_translation = 30.0;
};

/// Seeded random similarity: uniform random axis, angle in [0, max], scale
/// uniform in [min, max], translation uniform in the ball of the given radius.
AffineTransform3 random_similarity(std::uint64_t seed, const SimilarityRange& range = {});

}  // namespace cardioreg
