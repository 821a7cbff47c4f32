#include "cardioreg/cpd.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cardioreg/fusion.hpp"
#include "cardioreg/kdtree.hpp"

namespace cardioreg {

void CpdParams::validate() const {
  if (!(outlier_weight >= 0.0 && outlier_weight < 1.0)) {
    fail(ErrorCode::InvalidParameter, "cpd: outlier weight must lie in [0, 1)");
  }
  if (max_iterations < 1) fail(ErrorCode::InvalidParameter, "cpd: max_iterations must be >= 1");
  if (!(tolerance > 0.0)) fail(ErrorCode::InvalidParameter, "cpd: tolerance must be positive");
  if (!(sigma2_floor > 0.0)) fail(ErrorCode::InvalidParameter, "cpd: sigma2 floor must be positive");
}

namespace {

// Source centroids split per axis so the distance sweep vectorizes.
struct SourceColumns {
  std::vector<double> x, y, z;
  explicit SourceColumns(std::span<const Point3> pts)
      : x(pts.size()), y(pts.size()), z(pts.size()) {
    for (std::size_t m = 0; m < pts.size(); ++m) {
      x[m] = pts[m].x();
      y[m] = pts[m].y();
      z[m] = pts[m].z();
    }
  }
  std::size_t size() const { return x.size(); }
};

// Kernel terms below exp(-50) relative to the nearest centroid cannot move a
// sum that is already >= 1, so they are treated as exact zeros.
constexpr double kExponentCutoff = 50.0;

// log(sum_shifted + c exp(shift)), where the kernel terms were shifted by
// exp(shift) to keep the nearest one at 1.
double log_denominator(double sum, double log_c, double shift) {
  const double log_shifted_c = log_c + shift;
  const double log_sum = std::log(sum);
  if (log_shifted_c == -std::numeric_limits<double>::infinity()) return log_sum;
  const double hi = std::max(log_sum, log_shifted_c);
  const double lo = std::min(log_sum, log_shifted_c);
  return hi + std::log1p(std::exp(lo - hi));
}

// Per target point n: log of (sum_m exp(-d_mn / 2 sigma2) + c), evaluated
// with a max-shift so it survives sigma2 far below the squared spacing.
// `sink` receives exp(-d_mn / 2 sigma2) / (sum + c) for every non-zero term.
template <typename Sink>
double posterior_column(const SourceColumns& src, const Point3& p, double sigma2,
                        double log_c, std::vector<double>& scratch, Sink&& sink) {
  const std::size_t m_count = src.size();
  scratch.resize(m_count);
  const double px = p.x(), py = p.y(), pz = p.z();
  double* d = scratch.data();
  for (std::size_t m = 0; m < m_count; ++m) {
    const double dx = src.x[m] - px;
    const double dy = src.y[m] - py;
    const double dz = src.z[m] - pz;
    d[m] = dx * dx + dy * dy + dz * dz;
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < m_count; ++m) dmin = std::min(dmin, d[m]);
  const double inv_two_s2 = 0.5 / sigma2;
  double sum = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    const double e = (d[m] - dmin) * inv_two_s2;
    d[m] = e < kExponentCutoff ? std::exp(-e) : 0.0;
    sum += d[m];
  }
  const double log_den = log_denominator(sum, log_c, dmin * inv_two_s2);
  const double scale = std::exp(-log_den);
  for (std::size_t m = 0; m < m_count; ++m) {
    if (d[m] != 0.0) sink(m, d[m] * scale);
  }
  return log_den - dmin * inv_two_s2;
}

// Same column restricted to the centroids a tree query finds inside the
// cutoff radius. Produces exactly the non-zero terms of the dense sweep, in the
// same order, so both paths agree bit for bit.
template <typename Sink>
double posterior_column_local(std::span<const Point3> src, const KdTree& tree,
                              const Point3& p, double sigma2, double log_c,
                              std::vector<std::size_t>& idx, std::vector<double>& scratch,
                              Sink&& sink) {
  const double dmin = tree.nearest(p).squared_distance;
  const double inv_two_s2 = 0.5 / sigma2;
  tree.within(p, dmin + 2.0 * kExponentCutoff * sigma2 * (1.0 + 1e-9), idx);
  scratch.resize(idx.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double e = (squared_distance(src[idx[k]], p) - dmin) * inv_two_s2;
    scratch[k] = e < kExponentCutoff ? std::exp(-e) : 0.0;
    sum += scratch[k];
  }
  const double log_den = log_denominator(sum, log_c, dmin * inv_two_s2);
  const double scale = std::exp(-log_den);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (scratch[k] != 0.0) sink(idx[k], scratch[k] * scale);
  }
  return log_den - dmin * inv_two_s2;
}

// The tree pays off once the cutoff radius is small against the source extent.
bool use_local_search(std::span<const Point3> src, double sigma2) {
  if (src.size() < 64) return false;
  Eigen::Vector3d lo = src[0], hi = src[0];
  for (const auto& p : src) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return 2.0 * kExponentCutoff * sigma2 < 0.25 * (hi - lo).squaredNorm();
}

double log_outlier_constant(double sigma2, double w, std::size_t m_count, std::size_t n_count) {
  if (w == 0.0) return -std::numeric_limits<double>::infinity();
  return 1.5 * std::log(2.0 * std::numbers::pi * sigma2) + std::log(w / (1.0 - w)) +
         std::log(static_cast<double>(m_count) / static_cast<double>(n_count));
}

void check_estep_args(std::span<const Point3> src, std::span<const Point3> dst,
                      double sigma2, double w) {
  if (!(sigma2 > 0.0)) fail(ErrorCode::InvalidParameter, "cpd: sigma2 must be positive");
  if (!(w >= 0.0 && w < 1.0)) fail(ErrorCode::InvalidParameter, "cpd: w must lie in [0, 1)");
  if (src.empty() || dst.empty()) fail(ErrorCode::EmptyInput, "cpd: empty point set");
}

}  // namespace

GmmState cpd_estep(std::span<const Point3> transformed_src, std::span<const Point3> dst,
                   double sigma2, double w) {
  check_estep_args(transformed_src, dst, sigma2, w);
  const std::size_t m_count = transformed_src.size();
  const std::size_t n_count = dst.size();
  const double log_c = log_outlier_constant(sigma2, w, m_count, n_count);

  GmmState state;
  state.sigma2 = sigma2;
  state.row_sums.assign(m_count, 0.0);
  state.column_sums.assign(n_count, 0.0);
  state.weighted_targets.assign(m_count, Point3::Zero());

  std::vector<double> scratch;
  std::vector<std::size_t> idx;
  double log_den_total = 0.0;
  auto accumulate = [&](std::size_t n, auto&& column) {
    const Point3& x = dst[n];
    double col = 0.0;
    log_den_total += column(x, [&](std::size_t m, double p) {
      state.row_sums[m] += p;
      state.weighted_targets[m] += p * x;
      col += p;
    });
    state.column_sums[n] = col;
    state.total += col;
  };
  if (use_local_search(transformed_src, sigma2)) {
    const KdTree tree(transformed_src);
    for (std::size_t n = 0; n < n_count; ++n) {
      accumulate(n, [&](const Point3& x, auto&& sink) {
        return posterior_column_local(transformed_src, tree, x, sigma2, log_c, idx, scratch, sink);
      });
    }
  } else {
    const SourceColumns src(transformed_src);
    for (std::size_t n = 0; n < n_count; ++n) {
      accumulate(n, [&](const Point3& x, auto&& sink) {
        return posterior_column(src, x, sigma2, log_c, scratch, sink);
      });
    }
  }
  // p(x) = (1-w)/M (2 pi s2)^(-3/2) (sum_m exp(..) + c)
  const double log_norm = std::log1p(-w) - std::log(static_cast<double>(m_count)) -
                          1.5 * std::log(2.0 * std::numbers::pi * sigma2);
  state.negative_log_likelihood = -(static_cast<double>(n_count) * log_norm + log_den_total);
  return state;
}

std::vector<std::vector<double>> cpd_posterior(std::span<const Point3> transformed_src,
                                               std::span<const Point3> dst, double sigma2,
                                               double w) {
  check_estep_args(transformed_src, dst, sigma2, w);
  const double log_c = log_outlier_constant(sigma2, w, transformed_src.size(), dst.size());
  std::vector<std::vector<double>> p(transformed_src.size(),
                                     std::vector<double>(dst.size(), 0.0));
  const SourceColumns src(transformed_src);
  std::vector<double> scratch;
  for (std::size_t n = 0; n < dst.size(); ++n) {
    posterior_column(src, dst[n], sigma2, log_c, scratch,
                     [&](std::size_t m, double v) { p[m][n] = v; });
  }
  return p;
}

namespace {

struct WeightedMoments {
  Eigen::Vector3d mu_x;
  Eigen::Vector3d mu_y;
  Eigen::Matrix3d cross;     // A = X^T P^T Y on centred data
  Eigen::Matrix3d scatter_y; // Y^T diag(P1) Y on centred data
  double scatter_x = 0.0;    // tr(X^T diag(P^T 1) X) on centred data
};

WeightedMoments moments(const GmmState& s, std::span<const Point3> x,
                        std::span<const Point3> y) {
  WeightedMoments mo;
  Eigen::Vector3d sx = Eigen::Vector3d::Zero();
  Eigen::Vector3d sy = Eigen::Vector3d::Zero();
  for (std::size_t n = 0; n < x.size(); ++n) sx += s.column_sums[n] * x[n];
  for (std::size_t m = 0; m < y.size(); ++m) sy += s.row_sums[m] * y[m];
  mo.mu_x = sx / s.total;
  mo.mu_y = sy / s.total;

  mo.cross.setZero();
  mo.scatter_y.setZero();
  for (std::size_t m = 0; m < y.size(); ++m) {
    const Eigen::Vector3d yc = y[m] - mo.mu_y;
    // sum_n P_mn (x_n - mu_x) = PX_m - P1_m mu_x
    const Eigen::Vector3d px = s.weighted_targets[m] - s.row_sums[m] * mo.mu_x;
    mo.cross += px * yc.transpose();
    mo.scatter_y += s.row_sums[m] * yc * yc.transpose();
  }
  for (std::size_t n = 0; n < x.size(); ++n) {
    mo.scatter_x += s.column_sums[n] * (x[n] - mo.mu_x).squaredNorm();
  }
  return mo;
}

double initial_sigma2(std::span<const Point3> x, std::span<const Point3> ty) {
  // (1 / 3NM) sum_mn |x_n - y_m|^2 via first and second moments.
  Eigen::Vector3d sx = Eigen::Vector3d::Zero();
  Eigen::Vector3d sy = Eigen::Vector3d::Zero();
  double qx = 0.0;
  double qy = 0.0;
  for (const auto& p : x) {
    sx += p;
    qx += p.squaredNorm();
  }
  for (const auto& p : ty) {
    sy += p;
    qy += p.squaredNorm();
  }
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(ty.size());
  const double total = m * qx + n * qy - 2.0 * sx.dot(sy);
  return total / (3.0 * n * m);
}

template <typename MStep>
RegistrationResult run_em(const PointCloud& moving, const PointCloud& fixed,
                          const AffineTransform3& init, const CpdParams& params,
                          MStep&& mstep) {
  params.validate();
  if (moving.empty() || fixed.empty()) fail(ErrorCode::EmptyInput, "cpd: empty point cloud");
  if (moving.size() < 3 || fixed.size() < 3) {
    fail(ErrorCode::DegenerateConfiguration, "cpd: at least 3 points are required in each cloud");
  }
  const std::span<const Point3> x(fixed.points);
  const std::span<const Point3> y(moving.points);

  RegistrationResult result;
  AffineTransform3 current = init;
  std::vector<Point3> ty = apply_transform(y, current);
  double sigma2 = std::max(initial_sigma2(x, ty), params.sigma2_floor);

  for (int it = 0; it < params.max_iterations; ++it) {
    const GmmState state = cpd_estep(ty, x, sigma2, params.outlier_weight);
    result.objective_trace.push_back(state.negative_log_likelihood);
    const auto& trace = result.objective_trace;
    if (trace.size() >= 2) {
      const double prev = trace[trace.size() - 2];
      if (std::abs(prev - trace.back()) <= params.tolerance * std::abs(prev)) {
        result.converged = true;
        result.stop_reason = StopReason::RelativeTolerance;
        break;
      }
    }
    if (!(state.total >= 1e-12)) {
      fail(ErrorCode::NumericalCollapse,
           "cpd: all posterior mass assigned to the outlier component");
    }
    const WeightedMoments mo = moments(state, x, y);
    double residual = 0.0;
    current = mstep(mo, residual);
    sigma2 = std::max(residual / (3.0 * state.total), params.sigma2_floor);
    ty = apply_transform(y, current);
  }
  result.transform = current;
  result.sigma2 = sigma2;
  result.iterations = static_cast<int>(result.objective_trace.size());
  result.mde = mean_distance_error(PointCloud(ty), fixed);
  return result;
}

}  // namespace

RegistrationResult cpd_rigid(const PointCloud& moving, const PointCloud& fixed,
                             const AffineTransform3& init, const CpdParams& params) {
  return run_em(moving, fixed, init, params,
                [](const WeightedMoments& mo, double& residual) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(mo.cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d& u = svd.matrixU();
    const Eigen::Matrix3d& v = svd.matrixV();
    Eigen::Vector3d c(1.0, 1.0, (u * v.transpose()).determinant());
    const Eigen::Matrix3d r = u * c.asDiagonal() * v.transpose();
    const double tr_ar = (mo.cross.transpose() * r).trace();
    const double tr_yy = mo.scatter_y.trace();
    if (!(tr_yy > 0.0)) {
      fail(ErrorCode::DegenerateConfiguration, "cpd: weighted source scatter vanished");
    }
    const double s = tr_ar / tr_yy;
    AffineTransform3 t;
    t.linear = s * r;
    t.translation = mo.mu_x - s * r * mo.mu_y;
    t.kind = TransformKind::Similarity;
    residual = mo.scatter_x - s * tr_ar;
    return t;
  });
}

RegistrationResult cpd_affine(const PointCloud& moving, const PointCloud& fixed,
                              const AffineTransform3& init, const CpdParams& params) {
  return run_em(moving, fixed, init, params,
                [](const WeightedMoments& mo, double& residual) {
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(mo.scatter_y);
    if (!lu.isInvertible() || lu.rank() < 3) {
      fail(ErrorCode::DegenerateConfiguration, "cpd: source scatter matrix is singular");
    }
    // B = A S^-1 with S symmetric: solve S B^T = A^T.
    const Eigen::Matrix3d b = lu.solve(mo.cross.transpose()).transpose();
    AffineTransform3 t;
    t.linear = b;
    t.translation = mo.mu_x - b * mo.mu_y;
    t.kind = TransformKind::Affine;
    residual = mo.scatter_x - (mo.cross * b.transpose()).trace();
    return t;
  });
}

RegistrationResult cpd(const PointCloud& moving, const PointCloud& fixed,
                       const AffineTransform3& init, const CpdParams& params) {
  return params.mode == CpdMode::Rigid ? cpd_rigid(moving, fixed, init, params)
                                       : cpd_affine(moving, fixed, init, params);
}

}  // namespace cardioreg
