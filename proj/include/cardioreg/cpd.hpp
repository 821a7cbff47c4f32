#pragma once

#include <span>
#include <vector>

#include "cardioreg/registration.hpp"

namespace cardioreg {

enum class CpdMode { Rigid, Affine };

struct CpdParams {
  /// Uniform outlier component weight, in [0, 1).
  double outlier_weight = 0.1;
  int max_iterations = 150;
  /// Relative change of the negative log-likelihood.
  double tolerance = 1e-8;
  double sigma2_floor = 1e-10;
  CpdMode mode = CpdMode::Rigid;

  void validate() const;
};

/// Sufficient statistics of the posterior correspondence matrix P (M source
/// centroids by N target points). P itself is never stored.
struct GmmState {
  double sigma2 = 0.0;
  std::vector<double> row_sums;      // P 1, length M
  std::vector<double> column_sums;   // P^T 1, length N
  std::vector<Point3> weighted_targets;  // P X, M rows
  double total = 0.0;                // N_P = 1^T P 1
  /// Negative log-likelihood of the targets under the mixture.
  double negative_log_likelihood = 0.0;
};

GmmState cpd_estep(std::span<const Point3> transformed_src,
                   std::span<const Point3> dst, double sigma2, double w);

/// Dense posterior matrix, row m / column n. Intended for small problems and
/// inspection; the registration loop uses cpd_estep.
std::vector<std::vector<double>> cpd_posterior(std::span<const Point3> transformed_src,
                                               std::span<const Point3> dst,
                                               double sigma2, double w);

RegistrationResult cpd_rigid(const PointCloud& moving, const PointCloud& fixed,
                             const AffineTransform3& init, const CpdParams& params = {});

RegistrationResult cpd_affine(const PointCloud& moving, const PointCloud& fixed,
                              const AffineTransform3& init,
                              const CpdParams& params = {});

/// Dispatches on params.mode.
RegistrationResult cpd(const PointCloud& moving, const PointCloud& fixed,
                       const AffineTransform3& init, const CpdParams& params = {});

}  // namespace cardioreg
