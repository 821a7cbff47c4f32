#include "cardioreg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cardioreg {

bool SpatialReference::contains(const Index3& idx) const noexcept {
  for (int a = 0; a < 3; ++a) {
    if (idx[a] < 0 || idx[a] >= size_[a]) return false;
  }
  return true;
}

SpatialReference build_spatial_reference(const Index3& size, const Eigen::Vector3d& voxel,
                                         const Point3& origin) {
  for (int a = 0; a < 3; ++a) {
    if (size[a] < 1) fail(ErrorCode::InvalidParameter, "image size must be >= 1 on every axis");
    if (!(voxel[a] > 0.0) || !std::isfinite(voxel[a])) {
      fail(ErrorCode::InvalidParameter, "voxel extent must be positive and finite");
    }
    if (!std::isfinite(origin[a])) fail(ErrorCode::InvalidParameter, "origin must be finite");
  }
  SpatialReference ref;
  ref.size_ = size;
  ref.voxel_ = voxel;
  ref.origin_ = origin;
  for (int a = 0; a < 3; ++a) {
    ref.extent_[a] = static_cast<double>(size[a]) * voxel[a];
    ref.limit_hi_[a] = origin[a] + ref.extent_[a];
  }
  return ref;
}

Point3 voxel_to_world(const SpatialReference& ref, const Index3& idx) {
  if (!ref.contains(idx)) {
    fail(ErrorCode::IndexOutOfBounds,
         "voxel (" + std::to_string(idx[0]) + ", " + std::to_string(idx[1]) + ", " +
             std::to_string(idx[2]) + ") outside image");
  }
  return ref.center_unchecked(idx[0], idx[1], idx[2]);
}

void Volume::validate() const {
  if (data.size() != ref.voxel_count()) {
    fail(ErrorCode::InvalidData, "volume data length does not match its image size");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      fail(ErrorCode::InvalidData, "non-finite sample at voxel " + std::to_string(i));
    }
  }
}

namespace {

// Tolerance (in voxel units) for points that land on the hull of voxel centres
// up to rounding.
constexpr double kHullSlack = 1e-9;

struct AxisSample {
  int i0 = 0;
  int i1 = 0;
  double frac = 0.0;
};

std::optional<AxisSample> locate(double u, int n) {
  if (!(u >= -kHullSlack) || !(u <= (n - 1) + kHullSlack)) return std::nullopt;
  if (n == 1) return AxisSample{0, 0, 0.0};
  u = std::clamp(u, 0.0, static_cast<double>(n - 1));
  int i0 = static_cast<int>(std::floor(u));
  if (i0 > n - 2) i0 = n - 2;
  return AxisSample{i0, i0 + 1, u - i0};
}

}  // namespace

std::optional<double> sample_trilinear(const Volume& vol, const Point3& p) {
  const Eigen::Vector3d u = vol.ref.world_to_continuous_index(p);
  const auto& n = vol.ref.image_size();
  const auto ax = locate(u.x(), n[0]);
  const auto ay = locate(u.y(), n[1]);
  const auto az = locate(u.z(), n[2]);
  if (!ax || !ay || !az) return std::nullopt;

  auto v = [&](int i, int j, int k) { return static_cast<double>(vol.at(i, j, k)); };
  const double fx = ax->frac;
  const double fy = ay->frac;
  const double fz = az->frac;
  const double c00 = v(ax->i0, ay->i0, az->i0) * (1 - fx) + v(ax->i1, ay->i0, az->i0) * fx;
  const double c10 = v(ax->i0, ay->i1, az->i0) * (1 - fx) + v(ax->i1, ay->i1, az->i0) * fx;
  const double c01 = v(ax->i0, ay->i0, az->i1) * (1 - fx) + v(ax->i1, ay->i0, az->i1) * fx;
  const double c11 = v(ax->i0, ay->i1, az->i1) * (1 - fx) + v(ax->i1, ay->i1, az->i1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

Volume warp_volume(const Volume& moving, const AffineTransform3& t,
                   const SpatialReference& out_ref, float fill) {
  const AffineTransform3 inv = invert(t);
  Volume out(out_ref, fill);
  const auto& n = out_ref.image_size();
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const auto s = sample_trilinear(moving, inv(out_ref.center_unchecked(i, j, k)));
        if (s) out.at(i, j, k) = static_cast<float>(*s);
      }
    }
  }
  return out;
}

}  // namespace cardioreg
