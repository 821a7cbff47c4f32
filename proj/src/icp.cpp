#include "cardioreg/icp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "cardioreg/coarse.hpp"
#include "cardioreg/fusion.hpp"
#include "cardioreg/kdtree.hpp"

namespace cardioreg {

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::RelativeTolerance: return "relative-tolerance";
    case StopReason::AbsoluteTolerance: return "absolute-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::ScaleAtBound: return "scale-at-bound";
  }
  return "unknown";
}

void IcpParams::validate() const {
  if (max_iterations < 1) fail(ErrorCode::InvalidParameter, "icp: max_iterations must be >= 1");
  if (!(rel_tolerance > 0.0) || !(abs_tolerance > 0.0)) {
    fail(ErrorCode::InvalidParameter, "icp: tolerances must be positive");
  }
  if (!(scale_min > 0.0) || !(scale_min <= scale_max)) {
    fail(ErrorCode::InvalidParameter, "icp: scale bounds must satisfy 0 < min <= max");
  }
}

AffineTransform3 solve_rigid_svd(std::span<const Point3> src,
                                 std::span<const Point3> dst) {
  return estimate_umeyama(src, dst, /*with_scaling=*/false);
}

namespace {

void check_inputs(const PointCloud& moving, const PointCloud& fixed, const char* who) {
  if (moving.empty() || fixed.empty()) {
    fail(ErrorCode::EmptyInput, std::string(who) + ": empty point cloud");
  }
  if (moving.size() < 3 || fixed.size() < 3) {
    fail(ErrorCode::DegenerateConfiguration,
         std::string(who) + ": at least 3 points are required in each cloud");
  }
}

void gather_correspondences(const KdTree& tree, std::span<const Point3> fixed,
                            std::span<const Point3> moved, std::vector<Point3>& out) {
  out.resize(moved.size());
  for (std::size_t i = 0; i < moved.size(); ++i) {
    out[i] = fixed[tree.nearest(moved[i]).index];
  }
}

double sum_squared_residual(std::span<const Point3> src, std::span<const Point3> dst,
                            const Eigen::Matrix3d& linear, const Eigen::Vector3d& t) {
  double f = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    f += (linear * src[i] + t - dst[i]).squaredNorm();
  }
  return f;
}

Eigen::Vector3d mean_of(std::span<const Point3> pts) {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (const auto& p : pts) m += p;
  return m / static_cast<double>(pts.size());
}

// Returns true when the loop should stop; fills the reason.
bool check_stop(const std::vector<double>& trace, const IcpParams& params,
                StopReason& reason) {
  const double f = trace.back();
  if (f < params.abs_tolerance) {
    reason = StopReason::AbsoluteTolerance;
    return true;
  }
  if (trace.size() >= 2) {
    const double prev = trace[trace.size() - 2];
    if (prev - f <= params.rel_tolerance * prev) {
      reason = StopReason::RelativeTolerance;
      return true;
    }
  }
  return false;
}

void finish(RegistrationResult& result, const PointCloud& moving, const PointCloud& fixed) {
  result.iterations = static_cast<int>(result.objective_trace.size());
  result.mde = mean_distance_error(apply_transform(moving, result.transform), fixed);
}

}  // namespace

RegistrationResult icp(const PointCloud& moving, const PointCloud& fixed,
                       const AffineTransform3& init, const IcpParams& params) {
  params.validate();
  check_inputs(moving, fixed, "icp");

  const KdTree tree(fixed.points);
  const std::span<const Point3> base(moving.points);
  std::vector<Point3> targets;

  RegistrationResult result;
  AffineTransform3 current = init;
  for (int it = 0; it < params.max_iterations; ++it) {
    gather_correspondences(tree, fixed.points, apply_transform(base, current), targets);
    current = solve_rigid_svd(base, targets);
    result.objective_trace.push_back(
        sum_squared_residual(base, targets, current.linear, current.translation));
    if (check_stop(result.objective_trace, params, result.stop_reason)) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) result.stop_reason = StopReason::MaxIterations;
  result.transform = current;
  finish(result, moving, fixed);
  return result;
}

namespace {

struct ScaledRigid {
  Eigen::Vector3d scales = Eigen::Vector3d::Ones();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Matrix3d linear() const { return scales.asDiagonal() * rotation; }
};

struct ScaleUpdate {
  Eigen::Vector3d scales;
  bool at_bound = false;
};

ScaleUpdate solve_scales(std::span<const Point3> src, std::span<const Point3> dst,
                         const Eigen::Matrix3d& rotation, const Eigen::Vector3d& t,
                         const IcpParams& params) {
  Eigen::Vector3d num = Eigen::Vector3d::Zero();
  Eigen::Vector3d den = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d r = rotation * src[i];
    const Eigen::Vector3d q = dst[i] - t;
    num += q.cwiseProduct(r);
    den += r.cwiseProduct(r);
  }
  Eigen::Vector3d s;
  if (params.isotropic_scale) {
    s.setConstant(den.sum() > 0.0 ? num.sum() / den.sum() : 1.0);
  } else {
    for (int a = 0; a < 3; ++a) s[a] = den[a] > 0.0 ? num[a] / den[a] : 1.0;
  }
  ScaleUpdate out{s, false};
  for (int a = 0; a < 3; ++a) {
    const double c = std::clamp(s[a], params.scale_min, params.scale_max);
    if (c != s[a] && params.scale_min < params.scale_max) out.at_bound = true;
    out.scales[a] = c;
  }
  return out;
}

Eigen::Vector3d solve_translation(const Eigen::Vector3d& mean_src,
                                  const Eigen::Vector3d& mean_dst,
                                  const Eigen::Matrix3d& linear) {
  return mean_dst - linear * mean_src;
}

// One sweep of rotation -> scales -> translation for fixed correspondences.
// Each sub-step does not increase the objective.
bool sicp_sweep(std::span<const Point3> src, std::span<const Point3> dst,
                ScaledRigid& state, const IcpParams& params) {
  const Eigen::Vector3d mean_src = mean_of(src);
  const Eigen::Vector3d mean_dst = mean_of(dst);

  // (i) rotation: rigid fit of src onto scale-compensated targets; kept only
  // if it does not raise the objective at the current scales.
  std::vector<Point3> compensated(dst.size());
  const Eigen::Vector3d inv_s = state.scales.cwiseInverse();
  for (std::size_t i = 0; i < dst.size(); ++i) compensated[i] = inv_s.cwiseProduct(dst[i]);
  const AffineTransform3 rigid = solve_rigid_svd(src, compensated);
  {
    const Eigen::Matrix3d cand = state.scales.asDiagonal() * rigid.linear;
    const Eigen::Vector3d cand_t = solve_translation(mean_src, mean_dst, cand);
    const double f_cand = sum_squared_residual(src, dst, cand, cand_t);
    const double f_curr = sum_squared_residual(src, dst, state.linear(), state.translation);
    if (f_cand <= f_curr) {
      state.rotation = rigid.linear;
      state.translation = cand_t;
    }
  }

  // (ii) per-axis scales, closed form given rotation and translation.
  const ScaleUpdate su = solve_scales(src, dst, state.rotation, state.translation, params);
  state.scales = su.scales;

  // (iii) translation given scales and rotation.
  state.translation = solve_translation(mean_src, mean_dst, state.linear());
  return su.at_bound;
}

}  // namespace

RegistrationResult sicp(const PointCloud& moving, const PointCloud& fixed,
                        const AffineTransform3& init, const IcpParams& params) {
  params.validate();
  check_inputs(moving, fixed, "sicp");

  const KdTree tree(fixed.points);
  const std::span<const Point3> base(moving.points);
  std::vector<Point3> targets;

  RegistrationResult result;
  AffineTransform3 current = init;
  ScaledRigid state;
  bool at_bound = false;
  for (int it = 0; it < params.max_iterations; ++it) {
    gather_correspondences(tree, fixed.points, apply_transform(base, current), targets);
    if (it == 0) {
      // Seed with the similarity fit of the first correspondences, scale clamped.
      const AffineTransform3 sim = estimate_umeyama(base, targets, true);
      const double s = std::clamp(std::cbrt(sim.linear.determinant()), params.scale_min,
                                  params.scale_max);
      state.rotation = sim.linear / std::cbrt(sim.linear.determinant());
      state.scales.setConstant(s);
      state.translation = solve_translation(mean_of(base), mean_of(targets), state.linear());
    }
    at_bound = sicp_sweep(base, targets, state, params);
    current.linear = state.linear();
    current.translation = state.translation;
    current.kind = TransformKind::AnisotropicSimilarity;
    result.objective_trace.push_back(
        sum_squared_residual(base, targets, current.linear, current.translation));
    if (check_stop(result.objective_trace, params, result.stop_reason)) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) result.stop_reason = StopReason::MaxIterations;
  if (at_bound) {
    result.converged = false;
    result.stop_reason = StopReason::ScaleAtBound;
  }
  result.transform = current;
  finish(result, moving, fixed);
  return result;
}

}  // namespace cardioreg
