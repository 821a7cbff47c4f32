#pragma once

#include <span>

#include "cardioreg/registration.hpp"

namespace cardioreg {

struct IcpParams {
  int max_iterations = 100;
  /// Stop when (f_prev - f) <= rel_tolerance * f_prev.
  double rel_tolerance = 1e-8;
  /// Stop when f < abs_tolerance (mm^2).
  double abs_tolerance = 1e-12;
  /// Per-axis scale clamp used by sicp.
  double scale_min = 0.2;
  double scale_max = 5.0;
  /// Tie the three sicp scales to a single isotropic factor.
  bool isotropic_scale = false;

  void validate() const;
};

/// Rigid least-squares fit of matched pairs; never returns a reflection.
AffineTransform3 solve_rigid_svd(std::span<const Point3> src,
                                 std::span<const Point3> dst);

/// Point-to-point ICP. `init` only seeds the first correspondence search; each
/// iteration re-estimates a rigid map from the original moving coordinates, so
/// any scale carried by `init` is not retained.
RegistrationResult icp(const PointCloud& moving, const PointCloud& fixed,
                       const AffineTransform3& init, const IcpParams& params = {});

/// Scaled ICP with per-axis scales: minimises sum |diag(s) R p + t - q|^2.
RegistrationResult sicp(const PointCloud& moving, const PointCloud& fixed,
                        const AffineTransform3& init, const IcpParams& params = {});

}  // namespace cardioreg
