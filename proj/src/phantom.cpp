#include "cardioreg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace cardioreg {

void ShellParams::validate() const {
  if (!(semi_axes.minCoeff() > 0.0) || !semi_axes.allFinite()) {
    fail(ErrorCode::InvalidParameter, "shell: semi-axes must be positive");
  }
  if (!(truncation_fraction > 0.0 && truncation_fraction <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "shell: truncation fraction must lie in (0, 1]");
  }
  if (point_count < 10) fail(ErrorCode::InvalidParameter, "shell: point_count must be >= 10");
  if (landmark_count < 2) fail(ErrorCode::InvalidParameter, "shell: landmark_count must be >= 2");
}

std::pair<PointCloud, LandmarkSet> generate_lv_shell(const ShellParams& params) {
  params.validate();
  const double a = params.semi_axes.x();
  const double b = params.semi_axes.y();
  const double c = params.semi_axes.z();
  const double z_cut = -c + 2.0 * c * params.truncation_fraction;

  std::mt19937_64 rng(params.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w_max = std::max({b * c, a * c, a * b});

  PointCloud cloud;
  cloud.points.reserve(params.point_count);
  while (static_cast<int>(cloud.points.size()) < params.point_count) {
    const double uz = 2.0 * unit(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double accept = unit(rng);
    const double rho = std::sqrt(std::max(0.0, 1.0 - uz * uz));
    const double ux = rho * std::cos(phi);
    const double uy = rho * std::sin(phi);
    // Surface area element of the ellipsoid relative to the unit sphere.
    const double w = std::sqrt((b * c * ux) * (b * c * ux) + (a * c * uy) * (a * c * uy) +
                               (a * b * uz) * (a * b * uz));
    if (accept * w_max > w) continue;
    const Point3 p(a * ux, b * uy, c * uz);
    if (p.z() > z_cut) continue;
    cloud.points.push_back(p);
  }

  LandmarkSet lm;
  const double z_hi = std::min(z_cut, 0.9 * c);
  const double z_lo = -0.9 * c;
  const int count = params.landmark_count;
  for (int k = 0; k < count; ++k) {
    const double z = z_hi - (z_hi - z_lo) * k / (count - 1);
    const double r = std::sqrt(std::max(0.0, 1.0 - (z / c) * (z / c)));
    lm.anterior.emplace_back(a * r, 0.0, z);
    lm.posterior.emplace_back(-a * r, 0.0, z);
  }
  return {std::move(cloud), std::move(lm)};
}

std::pair<PointCloud, LandmarkSet> perturb_cloud(const PointCloud& cloud,
                                                 const LandmarkSet& landmarks,
                                                 const PerturbSpec& spec) {
  if (!(spec.noise_sigma >= 0.0)) fail(ErrorCode::InvalidParameter, "perturb: noise sigma must be >= 0");
  if (!(spec.outlier_fraction >= 0.0 && spec.outlier_fraction < 1.0)) {
    fail(ErrorCode::InvalidParameter, "perturb: outlier fraction must lie in [0, 1)");
  }
  std::mt19937_64 rng(spec.rng_seed);

  PointCloud out;
  out.values = cloud.values;
  out.points.reserve(cloud.size());
  LandmarkSet lm;
  for (const auto& p : cloud.points) out.points.push_back(spec.transform(p));
  for (const auto& p : landmarks.anterior) lm.anterior.push_back(spec.transform(p));
  for (const auto& p : landmarks.posterior) lm.posterior.push_back(spec.transform(p));

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    auto jitter = [&](Point3& p) {
      for (int a = 0; a < 3; ++a) p[a] += noise(rng);
    };
    std::for_each(out.points.begin(), out.points.end(), jitter);
    std::for_each(lm.anterior.begin(), lm.anterior.end(), jitter);
    std::for_each(lm.posterior.begin(), lm.posterior.end(), jitter);
  }

  const auto n_out =
      static_cast<std::size_t>(std::floor(spec.outlier_fraction * static_cast<double>(out.size())));
  if (n_out > 0) {
    Eigen::Vector3d lo = out.points.front(), hi = lo;
    for (const auto& p : out.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Eigen::Vector3d center = 0.5 * (lo + hi);
    const Eigen::Vector3d half = 0.5 * 1.2 * (hi - lo);
    std::vector<std::size_t> idx(out.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t k = 0; k < n_out; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
      std::swap(idx[k], idx[pick(rng)]);
      Point3 q;
      for (int a = 0; a < 3; ++a) q[a] = center[a] + half[a] * unit(rng);
      out.points[idx[k]] = q;
    }
  }
  return {std::move(out), std::move(lm)};
}

Volume generate_phantom_volume(const SpatialReference& ref,
                               const std::vector<EllipsoidShell>& shells) {
  for (const auto& s : shells) {
    if (!(s.semi_axes.minCoeff() > 0.0)) {
      fail(ErrorCode::InvalidParameter, "phantom volume: semi-axes must be positive");
    }
    if (!std::isfinite(s.intensity)) {
      fail(ErrorCode::InvalidParameter, "phantom volume: intensity must be finite");
    }
  }
  Volume vol(ref, 0.0f);
  const auto& n = ref.image_size();
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const Point3 x = ref.center_unchecked(i, j, k);
        double best_volume = std::numeric_limits<double>::infinity();
        for (const auto& s : shells) {
          const double r = ((x - s.center).cwiseQuotient(s.semi_axes)).squaredNorm();
          const double v = s.semi_axes.prod();
          if (r <= 1.0 && v <= best_volume) {
            best_volume = v;
            vol.at(i, j, k) = s.intensity;
          }
        }
      }
    }
  }
  return vol;
}

AffineTransform3 random_similarity(std::uint64_t seed, const SimilarityRange& range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
  if (axis.norm() == 0.0) axis = Eigen::Vector3d::UnitZ();
  const double angle = range.max_rotation_deg * std::numbers::pi / 180.0 * unit(rng);
  const double scale = range.scale_min + (range.scale_max - range.scale_min) * unit(rng);
  Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
  if (dir.norm() == 0.0) dir = Eigen::Vector3d::UnitX();
  const double radius = range.max_translation * std::cbrt(unit(rng));

  AffineTransform3 t;
  t.linear = scale * rotation_about(axis, angle);
  t.translation = radius * dir.normalized();
  t.kind = TransformKind::Similarity;
  return t;
}

}  // namespace cardioreg
