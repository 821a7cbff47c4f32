#include "cardioreg/coarse.hpp"

#include <algorithm>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace cardioreg {

std::vector<Point3> downsample_group(std::span<const Point3> group, std::size_t m) {
  if (group.empty()) fail(ErrorCode::EmptyInput, "landmark group is empty");
  if (m == 0) fail(ErrorCode::InvalidParameter, "target count must be >= 1");
  const std::size_t n = group.size();
  if (m >= n) return {group.begin(), group.end()};
  if (m == 1) return {group.front()};
  std::vector<Point3> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    // round-half-up of k (n-1) / (m-1) in exact integer arithmetic
    const std::size_t idx = (2 * k * (n - 1) + (m - 1)) / (2 * (m - 1));
    out.push_back(group[idx]);
  }
  return out;
}

LandmarkSet downsample_landmarks(const LandmarkSet& set, std::size_t m) {
  return {downsample_group(set.anterior, m), downsample_group(set.posterior, m)};
}

AffineTransform3 estimate_umeyama(std::span<const Point3> src,
                                  std::span<const Point3> dst,
                                  bool with_scaling) {
  if (src.size() != dst.size()) {
    fail(ErrorCode::ShapeMismatch,
         "umeyama: " + std::to_string(src.size()) + " source vs " +
             std::to_string(dst.size()) + " destination points");
  }
  const std::size_t n = src.size();
  if (n < 3) fail(ErrorCode::DegenerateConfiguration, "umeyama: fewer than 3 pairs");

  Eigen::Vector3d mu_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu_dst = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  mu_src *= inv_n;
  mu_dst *= inv_n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d a = src[i] - mu_src;
    const Eigen::Vector3d b = dst[i] - mu_dst;
    cov += b * a.transpose();
    var_src += a.squaredNorm();
  }
  cov *= inv_n;
  var_src *= inv_n;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d d = svd.singularValues();
  if (!(d(0) > 0.0) || d(1) <= 1e-12 * d(0) || !(var_src > 0.0)) {
    fail(ErrorCode::DegenerateConfiguration,
         "umeyama: cross-covariance has rank < 2 (collinear or coincident points)");
  }
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d s_diag(1.0, 1.0, 1.0);
  if (u.determinant() * v.determinant() < 0.0) s_diag(2) = -1.0;

  const Eigen::Matrix3d rotation = u * s_diag.asDiagonal() * v.transpose();
  const double scale = with_scaling ? d.dot(s_diag) / var_src : 1.0;

  AffineTransform3 t;
  t.linear = scale * rotation;
  t.translation = mu_dst - scale * rotation * mu_src;
  t.kind = with_scaling ? TransformKind::Similarity : TransformKind::Rigid;
  return t;
}

AffineTransform3 coarse_register(const LandmarkSet& moving,
                                 const LandmarkSet& fixed,
                                 const CoarseParams& params) {
  if (params.target_count && *params.target_count == 0) {
    fail(ErrorCode::InvalidParameter, "coarse: target count must be >= 1");
  }
  auto prepare = [&](std::span<const Point3> mov, std::span<const Point3> fix,
                     const char* label) {
    if (mov.empty() || fix.empty()) {
      fail(ErrorCode::EmptyInput, std::string("coarse: empty ") + label + " group");
    }
    const std::size_t m = params.target_count.value_or(std::min(mov.size(), fix.size()));
    auto a = downsample_group(mov, m);
    auto b = downsample_group(fix, m);
    if (a.size() != b.size()) {
      fail(ErrorCode::ShapeMismatch,
           std::string("coarse: ") + label + " groups have " + std::to_string(a.size()) +
               " and " + std::to_string(b.size()) + " points after downsampling");
    }
    return std::pair{std::move(a), std::move(b)};
  };

  auto [mov_ant, fix_ant] = prepare(moving.anterior, fixed.anterior, "anterior");
  auto [mov_post, fix_post] = prepare(moving.posterior, fixed.posterior, "posterior");

  std::vector<Point3> src = std::move(mov_ant);
  src.insert(src.end(), mov_post.begin(), mov_post.end());
  std::vector<Point3> dst = std::move(fix_ant);
  dst.insert(dst.end(), fix_post.begin(), fix_post.end());
  return estimate_umeyama(src, dst, params.with_scaling);
}

}  // namespace cardioreg
