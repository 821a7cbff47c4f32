#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cardioreg/core.hpp"

namespace cardioreg {

using Index3 = std::array<int, 3>;

/// Places a voxel grid in world millimetres. `origin` (L0, P0, S0) is the
/// lower corner of voxel (0,0,0); voxel centres sit half a voxel inside.
class SpatialReference {
 public:
  SpatialReference() = default;

  const Index3& image_size() const noexcept { return size_; }
  const Eigen::Vector3d& pixel_extent() const noexcept { return voxel_; }
  const Eigen::Vector3d& origin() const noexcept { return origin_; }
  /// IWX, IWY, IWZ.
  const Eigen::Vector3d& image_extent() const noexcept { return extent_; }
  /// XWL, YWL, ZWL as [lo, hi] per axis.
  std::pair<double, double> world_limits(int axis) const {
    return {origin_[axis], limit_hi_[axis]};
  }

  std::size_t voxel_count() const noexcept {
    return static_cast<std::size_t>(size_[0]) * size_[1] * size_[2];
  }
  bool contains(const Index3& idx) const noexcept;
  std::size_t linear_index(const Index3& idx) const noexcept {
    return static_cast<std::size_t>(idx[0]) +
           static_cast<std::size_t>(size_[0]) *
               (static_cast<std::size_t>(idx[1]) +
                static_cast<std::size_t>(size_[1]) * static_cast<std::size_t>(idx[2]));
  }

  /// Continuous voxel coordinates; integer values are voxel centres.
  Eigen::Vector3d world_to_continuous_index(const Point3& p) const {
    return ((p - origin_).cwiseQuotient(voxel_)).array() - 0.5;
  }
  /// Voxel-centre position without range checking (valid for padded indices).
  Point3 center_unchecked(double i, double j, double k) const {
    return origin_ + (Eigen::Vector3d(i, j, k).array() + 0.5).matrix().cwiseProduct(voxel_);
  }

  friend bool operator==(const SpatialReference& a, const SpatialReference& b) {
    return a.size_ == b.size_ && a.voxel_ == b.voxel_ && a.origin_ == b.origin_;
  }

 private:
  friend SpatialReference build_spatial_reference(const Index3&, const Eigen::Vector3d&,
                                                  const Point3&);
  Index3 size_{1, 1, 1};
  Eigen::Vector3d voxel_ = Eigen::Vector3d::Ones();
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d extent_ = Eigen::Vector3d::Ones();
  Eigen::Vector3d limit_hi_ = Eigen::Vector3d::Ones();
};

SpatialReference build_spatial_reference(const Index3& size, const Eigen::Vector3d& voxel,
                                         const Point3& origin);

Point3 voxel_to_world(const SpatialReference& ref, const Index3& idx);

/// Scalar grid, i fastest. Samples are 32-bit floats.
struct Volume {
  SpatialReference ref;
  std::vector<float> data;

  Volume() = default;
  explicit Volume(const SpatialReference& r, float fill = 0.0f)
      : ref(r), data(r.voxel_count(), fill) {}

  float at(const Index3& idx) const { return data[ref.linear_index(idx)]; }
  float& at(const Index3& idx) { return data[ref.linear_index(idx)]; }
  float at(int i, int j, int k) const { return at(Index3{i, j, k}); }
  float& at(int i, int j, int k) { return at(Index3{i, j, k}); }

  /// Throws InvalidData on size mismatch or non-finite samples.
  void validate() const;
};

/// Trilinear interpolation in world coordinates; nullopt when p lies outside
/// the convex hull of voxel centres.
std::optional<double> sample_trilinear(const Volume& vol, const Point3& p);

/// Pull-resamples `moving` onto `out_ref`. `t` maps moving world to output
/// world; each output centre x receives moving(t^-1 x), or `fill` outside.
Volume warp_volume(const Volume& moving, const AffineTransform3& t,
                   const SpatialReference& out_ref, float fill = 0.0f);

}  // namespace cardioreg
