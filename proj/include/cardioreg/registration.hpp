#pragma once

#include <string_view>
#include <vector>

#include "cardioreg/core.hpp"

namespace cardioreg {

enum class StopReason {
  RelativeTolerance,
  AbsoluteTolerance,
  MaxIterations,
  ScaleAtBound,
};

std::string_view to_string(StopReason reason) noexcept;

struct RegistrationResult {
  /// Maps original moving coordinates into fixed coordinates.
  AffineTransform3 transform;
  /// Objective value per iteration (sum of squared residuals for ICP/SICP,
  /// negative log-likelihood for CPD).
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIterations;
  /// Mean distance error of the final alignment, mm.
  double mde = 0.0;
  /// Final GMM variance (CPD only), mm^2.
  double sigma2 = 0.0;
};

}  // namespace cardioreg
