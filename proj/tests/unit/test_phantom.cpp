#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <Eigen/LU>

#include "cardioreg/error.hpp"
#include "cardioreg/fusion.hpp"
#include "cardioreg/phantom.hpp"
#include "cardioreg/segmentation.hpp"

using namespace cardioreg;

TEST(LvShell, SameSeedSameOutput) {
  ShellParams p;
  p.rng_seed = 42;
  const auto [a, la] = generate_lv_shell(p);
  const auto [b, lb] = generate_lv_shell(p);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(la.anterior, lb.anterior);
  EXPECT_EQ(la.posterior, lb.posterior);
  p.rng_seed = 43;
  EXPECT_NE(generate_lv_shell(p).first.points, a.points);
}

TEST(LvShell, FullEllipsoidSatisfiesEquation) {
  ShellParams p;
  p.truncation_fraction = 1.0;
  p.point_count = 3000;
  const auto [c, lm] = generate_lv_shell(p);
  ASSERT_EQ(c.size(), 3000u);
  const Eigen::Vector3d ax = p.semi_axes;
  for (const auto& q : c.points) {
    EXPECT_NEAR(q.cwiseQuotient(ax).squaredNorm(), 1.0, 1e-9);
  }
}

TEST(LvShell, TruncationRespected) {
  ShellParams p;
  const auto [c, lm] = generate_lv_shell(p);
  const double cut = -p.semi_axes.z() + 2.0 * p.semi_axes.z() * p.truncation_fraction;
  for (const auto& q : c.points) EXPECT_LE(q.z(), cut + 1e-12);
}

TEST(LvShell, LandmarksMonotoneBaseToApex) {
  ShellParams p;
  const auto [c, lm] = generate_lv_shell(p);
  ASSERT_EQ(lm.anterior.size(), static_cast<std::size_t>(p.landmark_count));
  ASSERT_EQ(lm.posterior.size(), static_cast<std::size_t>(p.landmark_count));
  for (const auto* g : {&lm.anterior, &lm.posterior}) {
    for (std::size_t i = 1; i < g->size(); ++i) EXPECT_LT((*g)[i].z(), (*g)[i - 1].z());
  }
  // Opposing meridians: anterior on +x, posterior on -x.
  for (const auto& q : lm.anterior) EXPECT_GT(q.x(), 0.0);
  for (const auto& q : lm.posterior) EXPECT_LT(q.x(), 0.0);
}

TEST(LvShell, RejectsBadParameters) {
  ShellParams p;
  p.point_count = 5;
  EXPECT_THROW(generate_lv_shell(p), Error);
  p = {};
  p.semi_axes.y() = 0.0;
  EXPECT_THROW(generate_lv_shell(p), Error);
}

TEST(Perturb, IdentityIsNoOp) {
  const auto [c, lm] = generate_lv_shell({});
  const auto [pc, plm] = perturb_cloud(c, lm, {});
  EXPECT_EQ(pc.points, c.points);
  EXPECT_EQ(plm.anterior, lm.anterior);
}

TEST(Perturb, NoiselessRigidMatchesTransform) {
  const auto [c, lm] = generate_lv_shell({});
  PerturbSpec s;
  s.transform.linear = rotation_about(Eigen::Vector3d::UnitY(), 0.4);
  s.transform.translation = {1, 2, 3};
  const auto [pc, plm] = perturb_cloud(c, lm, s);
  EXPECT_EQ(mean_distance_error(pc, apply_transform(c, s.transform)), 0.0);
}

TEST(Perturb, NoiseStandardDeviation) {
  ShellParams p;
  p.point_count = 10000;
  const auto [c, lm] = generate_lv_shell(p);
  PerturbSpec s;
  s.noise_sigma = 1.0;
  s.rng_seed = 7;
  const auto [pc, plm] = perturb_cloud(c, lm, s);
  for (int a = 0; a < 3; ++a) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double d = pc.points[i][a] - c.points[i][a];
      sum += d;
      sq += d * d;
    }
    const double n = static_cast<double>(c.size());
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
    EXPECT_NEAR(sd, 1.0, 0.05);
  }
}

TEST(Perturb, OutliersReplaceCloudPointsOnly) {
  const auto [c, lm] = generate_lv_shell({});
  PerturbSpec s;
  s.outlier_fraction = 0.1;
  const auto [pc, plm] = perturb_cloud(c, lm, s);
  std::size_t moved = 0;
  for (std::size_t i = 0; i < c.size(); ++i) moved += pc.points[i] != c.points[i];
  EXPECT_EQ(moved, c.size() / 10);
  EXPECT_EQ(plm.anterior, lm.anterior);
  EXPECT_EQ(plm.posterior, lm.posterior);
}

TEST(PhantomVolume, GrowRecoversAnalyticInterior) {
  const SpatialReference r = build_spatial_reference({20, 18, 24}, {1.5, 1.5, 1.5}, {-15, -13.5, -18});
  const EllipsoidShell e{{0.3, -0.2, 0.1}, {9, 7, 12}, 1000.0f};
  const Volume v = generate_phantom_volume(r, {e});
  const std::vector<Index3> seeds{{10, 9, 12}};
  const Mask m = region_grow(v, seeds, 400.0);
  for (int k = 0; k < 24; ++k)
    for (int j = 0; j < 18; ++j)
      for (int i = 0; i < 20; ++i) {
        const Point3 c = voxel_to_world(r, {i, j, k});
        const bool inside = (c - e.center).cwiseQuotient(e.semi_axes).squaredNorm() <= 1.0;
        EXPECT_EQ(m.at({i, j, k}), inside);
      }
}

TEST(PhantomVolume, EmptyShellListIsZero) {
  const SpatialReference r = build_spatial_reference({4, 4, 4}, {1, 1, 1}, {0, 0, 0});
  const Volume v = generate_phantom_volume(r, {});
  for (float x : v.data) EXPECT_EQ(x, 0.0f);
}

TEST(PhantomVolume, NestedShellsStopAtInnerBoundary) {
  const SpatialReference r = build_spatial_reference({24, 24, 24}, {1, 1, 1}, {-12, -12, -12});
  const EllipsoidShell outer{{0, 0, 0}, {11, 11, 11}, 300.0f};
  const EllipsoidShell inner{{0, 0, 0}, {5, 6, 7}, 1000.0f};
  const Volume v = generate_phantom_volume(r, {outer, inner});
  const std::vector<Index3> seeds{{12, 12, 12}};
  const Mask m = region_grow(v, seeds, 400.0);
  for (std::size_t i = 0; i < v.data.size(); ++i) EXPECT_EQ(m.data[i] != 0, v.data[i] == 1000.0f);
}

TEST(RandomSimilarity, WithinRange) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const AffineTransform3 t = random_similarity(seed);
    const double s = std::cbrt(t.linear.determinant());
    EXPECT_GE(s, 0.7);
    EXPECT_LE(s, 1.4);
    const Eigen::Matrix3d r = t.linear / s;
    EXPECT_TRUE((r * r.transpose()).isApprox(Eigen::Matrix3d::Identity(), 1e-12));
    const double angle = std::acos(std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0));
    EXPECT_LE(angle, 30.0 * std::numbers::pi / 180.0 + 1e-12);
    EXPECT_LE(t.translation.norm(), 30.0);
  }
}
