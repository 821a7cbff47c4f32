#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "cardioreg/error.hpp"
#include "cardioreg/volume.hpp"

using namespace cardioreg;

namespace {

std::string digits15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

SpatialReference cta() {
  return build_spatial_reference({512, 512, 253}, {0.4082, 0.4082, 0.5}, {-81.1, -278.1, -234.0});
}

Volume affine_field_volume(const SpatialReference& ref, double a, double b, double c, double d) {
  Volume v(ref);
  const auto& n = ref.image_size();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const Point3 p = voxel_to_world(ref, {i, j, k});
        v.at(i, j, k) = static_cast<float>(a * p.x() + b * p.y() + c * p.z() + d);
      }
  return v;
}

}  // namespace

TEST(SpatialReference, CtaExtentsAndLimits) {
  const SpatialReference r = cta();
  EXPECT_EQ(r.image_extent().x(), 208.9984);
  EXPECT_EQ(r.image_extent().y(), 208.9984);
  EXPECT_EQ(r.image_extent().z(), 126.5);
  const auto [lo, hi] = r.world_limits(0);
  EXPECT_EQ(lo, -81.1);
  EXPECT_EQ(hi, lo + r.image_extent().x());
  // The decimal 127.8984 is not representable; agreement is to 15 digits.
  EXPECT_EQ(digits15(hi), "127.8984");
  EXPECT_LE(std::abs(hi - 127.8984), std::nextafter(127.8984, 1e9) - 127.8984);
  EXPECT_EQ(r.world_limits(2).first, -234.0);
  EXPECT_EQ(r.world_limits(2).second, -107.5);
}

TEST(SpatialReference, SpectDepthLimit) {
  const SpatialReference r = build_spatial_reference({64, 64, 27}, {6.4, 6.4, 6.4}, {0, 0, 0});
  const auto [lo, hi] = r.world_limits(2);
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 27 * 6.4);
  EXPECT_EQ(digits15(hi), "172.8");
}

TEST(SpatialReference, UnitCube) {
  const SpatialReference r = build_spatial_reference({1, 1, 1}, {1, 1, 1}, {0, 0, 0});
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(r.world_limits(a).first, 0.0);
    EXPECT_EQ(r.world_limits(a).second, 1.0);
  }
}

TEST(SpatialReference, IdentitiesHoldExactly) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> n(1, 600);
  std::uniform_real_distribution<double> vx(0.01, 10.0), org(-500, 500);
  for (int t = 0; t < 500; ++t) {
    const Index3 size{n(rng), n(rng), n(rng)};
    const Eigen::Vector3d voxel(vx(rng), vx(rng), vx(rng));
    const Point3 origin(org(rng), org(rng), org(rng));
    const SpatialReference r = build_spatial_reference(size, voxel, origin);
    for (int a = 0; a < 3; ++a) {
      EXPECT_EQ(r.image_extent()[a], size[a] * voxel[a]);
      EXPECT_EQ(r.world_limits(a).first, origin[a]);
      EXPECT_EQ(r.world_limits(a).second, origin[a] + size[a] * voxel[a]);
    }
    EXPECT_EQ(r.image_size(), size);
  }
}

TEST(SpatialReference, RejectsBadParameters) {
  for (auto [size, voxel] : {std::pair{Index3{0, 1, 1}, Eigen::Vector3d(1, 1, 1)},
                             std::pair{Index3{1, 1, 1}, Eigen::Vector3d(1, 0, 1)},
                             std::pair{Index3{1, -3, 1}, Eigen::Vector3d(1, 1, 1)},
                             std::pair{Index3{1, 1, 1}, Eigen::Vector3d(1, 1, -2)}}) {
    try {
      build_spatial_reference(size, voxel, Point3::Zero());
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
    }
  }
}

TEST(VoxelToWorld, Centres) {
  const SpatialReference unit = build_spatial_reference({1, 1, 1}, {1, 1, 1}, {0, 0, 0});
  EXPECT_EQ(voxel_to_world(unit, {0, 0, 0}), Point3(0.5, 0.5, 0.5));
  const Point3 c = voxel_to_world(cta(), {0, 0, 0});
  EXPECT_NEAR(c.x(), -81.1 + 0.2041, 1e-12);
  EXPECT_NEAR(c.y(), -278.1 + 0.2041, 1e-12);
  EXPECT_NEAR(c.z(), -234.0 + 0.25, 1e-12);
}

TEST(VoxelToWorld, LastCentreInsideLimits) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> n(1, 300);
  std::uniform_real_distribution<double> vx(0.05, 8.0), org(-400, 400);
  for (int t = 0; t < 300; ++t) {
    const SpatialReference r = build_spatial_reference(
        {n(rng), n(rng), n(rng)}, {vx(rng), vx(rng), vx(rng)}, {org(rng), org(rng), org(rng)});
    const auto& s = r.image_size();
    const Point3 last = voxel_to_world(r, {s[0] - 1, s[1] - 1, s[2] - 1});
    for (int a = 0; a < 3; ++a) {
      EXPECT_GT(last[a], r.world_limits(a).first);
      EXPECT_LT(last[a], r.world_limits(a).second);
    }
  }
}

TEST(VoxelToWorld, OutOfRange) {
  const SpatialReference r = build_spatial_reference({2, 2, 2}, {1, 1, 1}, {0, 0, 0});
  for (Index3 idx : {Index3{2, 0, 0}, Index3{0, -1, 0}, Index3{0, 0, 5}}) {
    try {
      voxel_to_world(r, idx);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::IndexOutOfBounds);
    }
  }
}

TEST(SampleTrilinear, ExactAtCentres) {
  const SpatialReference r = build_spatial_reference({4, 3, 2}, {1.5, 2, 1}, {-3, 1, 7});
  Volume v(r);
  for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] = static_cast<float>(i * 7 % 11);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(*sample_trilinear(v, voxel_to_world(r, {i, j, k})), v.at(i, j, k));
      }
}

TEST(SampleTrilinear, MidpointIsMean) {
  const SpatialReference r = build_spatial_reference({2, 1, 1}, {1, 1, 1}, {0, 0, 0});
  Volume v(r);
  v.at(1, 0, 0) = 10.0f;
  EXPECT_DOUBLE_EQ(*sample_trilinear(v, {1.0, 0.5, 0.5}), 5.0);
}

TEST(SampleTrilinear, OutsideHull) {
  const SpatialReference r = build_spatial_reference({3, 3, 3}, {1, 1, 1}, {0, 0, 0});
  const Volume v(r, 1.0f);
  EXPECT_FALSE(sample_trilinear(v, {0.2, 1.5, 1.5}).has_value());
  EXPECT_FALSE(sample_trilinear(v, {1.5, 1.5, 2.9}).has_value());
  EXPECT_TRUE(sample_trilinear(v, {0.5, 2.5, 1.0}).has_value());
}

TEST(SampleTrilinear, ReproducesAffineField) {
  const SpatialReference r = build_spatial_reference({10, 9, 8}, {1.25, 0.75, 2}, {-5, 3, 1});
  // Integer-valued field at the centres keeps float storage exact.
  const Volume v = affine_field_volume(r, 2.0 / 1.25, -1.0 / 0.75, 3.0 / 2.0, 0.0);
  auto f = [](const Point3& p) {
    return 2.0 / 1.25 * p.x() - 1.0 / 0.75 * p.y() + 1.5 * p.z();
  };
  std::mt19937_64 rng(3);
  const Point3 lo = voxel_to_world(r, {0, 0, 0}), hi = voxel_to_world(r, {9, 8, 7});
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 500; ++t) {
    const Point3 p = lo + (hi - lo).cwiseProduct(Point3(u(rng), u(rng), u(rng)));
    const double want = f(p);
    EXPECT_NEAR(*sample_trilinear(v, p), want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(SampleTrilinear, SingleVoxelAxis) {
  const SpatialReference r = build_spatial_reference({3, 1, 1}, {1, 1, 1}, {0, 0, 0});
  Volume v(r);
  v.at(0, 0, 0) = 0;
  v.at(1, 0, 0) = 4;
  v.at(2, 0, 0) = 8;
  EXPECT_DOUBLE_EQ(*sample_trilinear(v, {1.75, 0.5, 0.5}), 5.0);
  EXPECT_FALSE(sample_trilinear(v, {1.75, 0.6, 0.5}).has_value());
}

TEST(WarpVolume, IdentityIsExact) {
  const SpatialReference r = build_spatial_reference({7, 6, 5}, {0.7, 1.1, 2.3}, {3, -2, 9});
  Volume v(r);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(-100, 100);
  for (auto& x : v.data) x = u(rng);
  EXPECT_EQ(warp_volume(v, AffineTransform3::identity(), r).data, v.data);
}

TEST(WarpVolume, OneVoxelShift) {
  const SpatialReference r = build_spatial_reference({5, 4, 3}, {2, 1, 1}, {0, 0, 0});
  Volume v(r);
  for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] = static_cast<float>(i + 1);
  AffineTransform3 t;
  t.translation = {2, 0, 0};  // one voxel pitch along i
  const Volume out = warp_volume(v, t, r, -1.0f);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(out.at(0, j, k), -1.0f);
      for (int i = 1; i < 5; ++i) EXPECT_EQ(out.at(i, j, k), v.at(i - 1, j, k));
    }
}

TEST(WarpVolume, AnalyticFieldUnderAffine) {
  const SpatialReference r = build_spatial_reference({16, 14, 12}, {1, 1.2, 1.5}, {-8, -8, -9});
  Volume v(r);
  for (int k = 0; k < 12; ++k)
    for (int j = 0; j < 14; ++j)
      for (int i = 0; i < 16; ++i) v.at(i, j, k) = static_cast<float>(voxel_to_world(r, {i, j, k}).x());
  AffineTransform3 t;
  t.linear << 1.1, 0.1, 0, -0.05, 0.95, 0.1, 0, 0.02, 1.05;
  t.translation = {0.5, -0.25, 1};
  t.kind = TransformKind::Affine;
  const Volume out = warp_volume(v, t, r);
  const AffineTransform3 inv = invert(t);
  int checked = 0;
  for (int k = 0; k < 12; ++k)
    for (int j = 0; j < 14; ++j)
      for (int i = 0; i < 16; ++i) {
        const Point3 src = inv(voxel_to_world(r, {i, j, k}));
        const Eigen::Vector3d ci = r.world_to_continuous_index(src);
        if ((ci.array() < 1e-9).any() || (ci.array() > Eigen::Array3d(15, 13, 11) - 1e-9).any()) {
          continue;
        }
        ++checked;
        EXPECT_NEAR(out.at(i, j, k), src.x(), 1e-6 * 8.0);
      }
  EXPECT_GT(checked, 500);
}

TEST(WarpVolume, CompositionConsistency) {
  const SpatialReference r = build_spatial_reference({14, 14, 14}, {1, 1, 1}, {-7, -7, -7});
  const Volume v = affine_field_volume(r, 1.0, -2.0, 0.5, 3.0);
  AffineTransform3 a, b;
  a.linear = rotation_about(Eigen::Vector3d::UnitZ(), 0.1);
  a.translation = {0.3, 0, 0};
  b.linear = 1.05 * rotation_about(Eigen::Vector3d::UnitX(), -0.08);
  b.translation = {0, 0.2, -0.1};
  b.kind = TransformKind::Similarity;
  const Volume twice = warp_volume(warp_volume(v, a, r, 0.0f), b, r, 0.0f);
  const Volume once = warp_volume(v, compose(b, a), r, 0.0f);
  const double range = 3.5 * 14;
  // Compare where both paths stayed inside the data (away from the fill border).
  for (int k = 3; k < 11; ++k)
    for (int j = 3; j < 11; ++j)
      for (int i = 3; i < 11; ++i) EXPECT_NEAR(twice.at(i, j, k), once.at(i, j, k), 1e-3 * range);
}

TEST(WarpVolume, SingularTransformRejected) {
  const SpatialReference r = build_spatial_reference({2, 2, 2}, {1, 1, 1}, {0, 0, 0});
  AffineTransform3 t;
  t.linear.setZero();
  try {
    warp_volume(Volume(r), t, r);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularTransform);
  }
}

TEST(VolumeValidate, RejectsNonFinite) {
  Volume v(build_spatial_reference({2, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  v.data[1] = std::nanf("");
  EXPECT_THROW(v.validate(), Error);
}
