#include "cardioreg/core.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "cardioreg/kdtree.hpp"

namespace cardioreg {

void PointCloud::validate() const {
  if (values && values->size() != points.size()) {
    fail(ErrorCode::InvalidData,
         "point cloud has " + std::to_string(points.size()) + " points but " +
             std::to_string(values->size()) + " values");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      fail(ErrorCode::InvalidData,
           "non-finite coordinate at point " + std::to_string(i));
    }
  }
}

std::string_view to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::Rigid: return "rigid";
    case TransformKind::Similarity: return "similarity";
    case TransformKind::AnisotropicSimilarity: return "anisotropic-similarity";
    case TransformKind::Affine: return "affine";
  }
  return "affine";
}

TransformKind transform_kind_from_string(std::string_view name) {
  if (name == "rigid") return TransformKind::Rigid;
  if (name == "similarity") return TransformKind::Similarity;
  if (name == "anisotropic-similarity") return TransformKind::AnisotropicSimilarity;
  if (name == "affine") return TransformKind::Affine;
  fail(ErrorCode::ParseError, "unknown transform kind '" + std::string(name) + "'");
}

Eigen::Matrix4d AffineTransform3::homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = linear;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

AffineTransform3 AffineTransform3::from_homogeneous(const Eigen::Matrix4d& m,
                                                    TransformKind kind) {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    fail(ErrorCode::InvalidData, "last homogeneous row must be (0, 0, 0, 1)");
  }
  AffineTransform3 t;
  t.linear = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  t.kind = kind;
  return t;
}

namespace {

TransformKind composed_kind(TransformKind outer, TransformKind inner) {
  using K = TransformKind;
  if (outer == K::Affine || inner == K::Affine) return K::Affine;
  if (outer == K::AnisotropicSimilarity) {
    // diag(s) R (c Q) stays diagonal-times-rotation; the reverse order does not.
    return K::AnisotropicSimilarity;
  }
  if (inner == K::AnisotropicSimilarity) return K::Affine;
  if (outer == K::Similarity || inner == K::Similarity) return K::Similarity;
  return K::Rigid;
}

}  // namespace

PointCloud apply_transform(const PointCloud& cloud, const AffineTransform3& t) {
  if (cloud.empty()) fail(ErrorCode::EmptyInput, "apply_transform: empty cloud");
  PointCloud out;
  out.points = apply_transform(std::span<const Point3>(cloud.points), t);
  out.values = cloud.values;
  return out;
}

std::vector<Point3> apply_transform(std::span<const Point3> points,
                                    const AffineTransform3& t) {
  std::vector<Point3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(t(p));
  return out;
}

AffineTransform3 compose(const AffineTransform3& outer,
                         const AffineTransform3& inner) {
  AffineTransform3 r;
  r.linear = outer.linear * inner.linear;
  r.translation = outer.linear * inner.translation + outer.translation;
  r.kind = composed_kind(outer.kind, inner.kind);
  return r;
}

AffineTransform3 invert(const AffineTransform3& t) {
  const double det = t.linear.determinant();
  const double scale = t.linear.norm();
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale * scale * scale) {
    fail(ErrorCode::SingularTransform, "transform linear part is singular");
  }
  AffineTransform3 r;
  r.linear = t.linear.inverse();
  r.translation = -(r.linear * t.translation);
  r.kind = t.kind == TransformKind::AnisotropicSimilarity ? TransformKind::Affine
                                                          : t.kind;
  return r;
}

std::vector<Pairing> nearest_neighbors(const PointCloud& query,
                                       const PointCloud& target) {
  if (target.empty()) fail(ErrorCode::EmptyInput, "nearest_neighbors: empty target");
  const KdTree tree(target.points);
  std::vector<Pairing> out(query.size());
  for (std::size_t i = 0; i < query.size(); ++i) {
    const auto hit = tree.nearest(query.points[i]);
    out[i] = {i, hit.index, std::sqrt(hit.squared_distance)};
  }
  return out;
}

Eigen::Matrix3d rotation_about(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace cardioreg
