#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cardioreg/error.hpp"

namespace cardioreg {

/// World-coordinate point in millimetres.
using Point3 = Eigen::Vector3d;

struct PointCloud {
  std::vector<Point3> points;
  /// Optional scalar payload (e.g. perfusion counts), one per point.
  std::optional<std::vector<double>> values;

  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> pts) : points(std::move(pts)) {}
  PointCloud(std::vector<Point3> pts, std::vector<double> vals)
      : points(std::move(pts)), values(std::move(vals)) {}

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_values() const noexcept { return values.has_value(); }

  /// Throws InvalidData on non-finite coordinates or a payload length mismatch.
  void validate() const;
};

enum class TransformKind { Rigid, Similarity, AnisotropicSimilarity, Affine };

std::string_view to_string(TransformKind kind) noexcept;
TransformKind transform_kind_from_string(std::string_view name);

/// p' = linear * p + translation. Column-vector convention throughout.
struct AffineTransform3 {
  Eigen::Matrix3d linear = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  TransformKind kind = TransformKind::Rigid;

  static AffineTransform3 identity() { return {}; }

  Point3 operator()(const Point3& p) const { return linear * p + translation; }

  /// 4x4 homogeneous matrix with last row (0,0,0,1).
  Eigen::Matrix4d homogeneous() const;
  static AffineTransform3 from_homogeneous(const Eigen::Matrix4d& m,
                                           TransformKind kind);
};

struct Pairing {
  std::size_t src_index = 0;
  std::size_t dst_index = 0;
  double distance = 0.0;
};

PointCloud apply_transform(const PointCloud& cloud, const AffineTransform3& t);
std::vector<Point3> apply_transform(std::span<const Point3> points,
                                    const AffineTransform3& t);

/// apply(compose(outer, inner), p) == apply(outer, apply(inner, p)).
AffineTransform3 compose(const AffineTransform3& outer,
                         const AffineTransform3& inner);

AffineTransform3 invert(const AffineTransform3& t);

/// Exact nearest neighbour of every query point in `target`; ties go to the
/// lowest target index.
std::vector<Pairing> nearest_neighbors(const PointCloud& query,
                                       const PointCloud& target);

/// Rotation about a unit axis (Rodrigues), angle in radians.
Eigen::Matrix3d rotation_about(const Eigen::Vector3d& axis, double angle);

}  // namespace cardioreg
