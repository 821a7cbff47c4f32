#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cardioreg/error.hpp"
#include "cardioreg/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cardioreg;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cardioreg_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  void write_text(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  fs::path dir_;
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

TriMesh tetrahedron() {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

}  // namespace

TEST_F(IoTest, PointCloudRoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    PointCloud c(oracle::random_points(rng, 1 + static_cast<std::size_t>(trial) * 13, -500, 500));
    io::write_point_cloud(path("c.ply"), c);
    const PointCloud r = io::read_point_cloud(path("c.ply"));
    ASSERT_EQ(r.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE((r.points[i] - c.points[i]).norm(), 1e-6);
    EXPECT_FALSE(r.has_values());
  }
}

TEST_F(IoTest, PointCloudValuesPropertyPresence) {
  PointCloud c({{1, 2, 3}, {4, 5, 6}}, {0.1, -7.25});
  std::ostringstream with, without;
  io::write_point_cloud(with, c);
  io::write_point_cloud(without, PointCloud(c.points));
  EXPECT_NE(with.str().find("property double value"), std::string::npos);
  EXPECT_EQ(without.str().find("value"), std::string::npos);
  std::istringstream in(with.str());
  EXPECT_EQ(io::read_point_cloud(in).values, c.values);
}

TEST_F(IoTest, PointCloudTruncatedReportsLine) {
  write_text("t.ply",
             "ply\nformat ascii 1.0\nelement vertex 3\nproperty double x\nproperty double y\n"
             "property double z\nend_header\n0 0 0\n1 1 1\n");
  try {
    io::read_point_cloud(path("t.ply"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("t.ply:"), std::string::npos) << e.what();
  }
}

TEST_F(IoTest, PointCloudAcceptsFloatPropertiesAndExtraColumns) {
  write_text("f.ply",
             "ply\nformat ascii 1.0\ncomment from elsewhere\nelement vertex 2\nproperty float x\n"
             "property float y\nproperty float z\nproperty uchar red\nproperty float value\n"
             "end_header\n1 2 3 255 0.5\n4 5 6 0 1.5\n");
  const PointCloud c = io::read_point_cloud(path("f.ply"));
  EXPECT_EQ(c.points[1], Point3(4, 5, 6));
  EXPECT_EQ(*c.values, (std::vector<double>{0.5, 1.5}));
}

TEST_F(IoTest, MeshTetrahedronRoundTrip) {
  TriMesh m = tetrahedron();
  m.vertex_values = std::vector<double>{1.5, 2.5, 3.5, 4.5};
  io::write_mesh(path("t.stl"), m);
  EXPECT_EQ(fs::file_size(path("t.stl")), 84u + 4u * 50u);
  const TriMesh r = io::read_mesh(path("t.stl"));
  EXPECT_EQ(r.vertices.size(), 4u);
  EXPECT_EQ(r.triangles.size(), 4u);
  ASSERT_TRUE(r.vertex_values.has_value());
  for (std::size_t t = 0; t < 4; ++t)
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(r.vertices[r.triangles[t][k]], m.vertices[m.triangles[t][k]]);
      EXPECT_EQ((*r.vertex_values)[r.triangles[t][k]], (*m.vertex_values)[m.triangles[t][k]]);
    }
}

TEST_F(IoTest, MeshWithoutValuesHasNoSidecar) {
  io::write_mesh(path("t.stl"), tetrahedron());
  EXPECT_FALSE(fs::exists(io::values_sidecar(path("t.stl"))));
  EXPECT_FALSE(io::read_mesh(path("t.stl")).vertex_values.has_value());
}

TEST_F(IoTest, EmptyMeshRejectedOnWrite) {
  EXPECT_EQ(code_of([&] { io::write_mesh(path("e.stl"), TriMesh{}); }), ErrorCode::EmptyInput);
}

TEST_F(IoTest, MeshCountExceedingLength) {
  io::write_mesh(path("t.stl"), tetrahedron());
  {
    std::fstream f(path("t.stl"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(80);
    const std::uint32_t lie = 9;
    char b[4];
    std::memcpy(b, &lie, 4);
    f.write(b, 4);
  }
  EXPECT_EQ(code_of([&] { io::read_mesh(path("t.stl")); }), ErrorCode::ParseError);
}

TEST_F(IoTest, VolumeCtaHeaderRoundTrip) {
  const SpatialReference ref =
      build_spatial_reference({512, 512, 253}, {0.4082, 0.4082, 0.5}, {-81.1, -278.1, -234});
  Volume v(ref);
  v.data[12345] = 1.25f;
  v.data.back() = -3.0f;
  io::write_volume(path("cta.vol"), v);
  EXPECT_EQ(io::read_reference(path("cta.vol")), ref);
  const Volume r = io::read_volume(path("cta.vol"));
  EXPECT_EQ(r.ref, ref);
  EXPECT_EQ(r.ref.world_limits(0), ref.world_limits(0));
  EXPECT_EQ(r.data, v.data);
}

TEST_F(IoTest, VolumeSingleVoxelBitExact) {
  Volume v(build_spatial_reference({1, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  v.data[0] = std::nextafter(1.0f, 2.0f);
  io::write_volume(path("one.vol"), v);
  EXPECT_EQ(io::read_volume(path("one.vol")).data, v.data);
}

TEST_F(IoTest, VolumeNanRejected) {
  Volume v(build_spatial_reference({2, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  io::write_volume(path("ok.vol"), v);
  std::string bytes;
  {
    std::ifstream f(path("ok.vol"), std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(f), {});
  }
  const float nan = std::nanf("");
  std::memcpy(bytes.data() + bytes.size() - 4, &nan, 4);
  write_text("nan.vol", bytes);
  EXPECT_EQ(code_of([&] { io::read_volume(path("nan.vol")); }), ErrorCode::InvalidData);
}

TEST_F(IoTest, MaskRoundTrip) {
  Mask m(build_spatial_reference({3, 4, 5}, {1, 2, 3}, {-1, 0, 1}));
  for (std::size_t i = 0; i < m.data.size(); i += 3) m.data[i] = 1;
  io::write_mask(path("m.vol"), m);
  const Mask r = io::read_mask(path("m.vol"));
  EXPECT_EQ(r.ref, m.ref);
  EXPECT_EQ(r.data, m.data);
  // A mask is not a float volume, and vice versa.
  EXPECT_EQ(code_of([&] { io::read_volume(path("m.vol")); }), ErrorCode::ParseError);
}

TEST_F(IoTest, TransformRoundTripExact) {
  io::write_transform(path("id.txt"), AffineTransform3::identity());
  const AffineTransform3 id = io::read_transform(path("id.txt"));
  EXPECT_EQ(id.linear, Eigen::Matrix3d::Identity());
  EXPECT_EQ(id.translation, Eigen::Vector3d::Zero());
  EXPECT_EQ(id.kind, TransformKind::Rigid);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    AffineTransform3 t;
    t.linear = Eigen::Matrix3d::NullaryExpr([&] { return u(rng); });
    t.translation = {u(rng), 1e-300 * u(rng), u(rng) * 1e12};
    t.kind = TransformKind::Affine;
    std::stringstream ss;
    io::write_transform(ss, t);
    const AffineTransform3 r = io::read_transform(ss);
    EXPECT_EQ(r.linear, t.linear);
    EXPECT_EQ(r.translation, t.translation);
  }
}

TEST_F(IoTest, TransformThreeRowsIsParseError) {
  write_text("t.txt", "cardioreg-transform 1\nkind rigid\n1 0 0 0\n0 1 0 0\n0 0 1 0\n");
  EXPECT_EQ(code_of([&] { io::read_transform(path("t.txt")); }), ErrorCode::ParseError);
}

TEST_F(IoTest, TransformBadLastRowIsInvalidData) {
  write_text("t.txt", "cardioreg-transform 1\nkind affine\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0.5 1\n");
  EXPECT_EQ(code_of([&] { io::read_transform(path("t.txt")); }), ErrorCode::InvalidData);
}

TEST_F(IoTest, LandmarkOrderPreserved) {
  std::mt19937_64 rng(3);
  LandmarkSet s;
  s.anterior = oracle::random_points(rng, 9, -100, 100);
  s.posterior = oracle::random_points(rng, 4, -100, 100);
  io::write_landmarks(path("l.lmk"), s);
  const LandmarkSet r = io::read_landmarks(path("l.lmk"));
  EXPECT_EQ(r.anterior, s.anterior);
  EXPECT_EQ(r.posterior, s.posterior);
}

TEST_F(IoTest, LandmarksMissingGroupIsParseError) {
  write_text("l.lmk", "cardioreg-landmarks 1\nanterior 1\n0 0 0\n");
  EXPECT_EQ(code_of([&] { io::read_landmarks(path("l.lmk")); }), ErrorCode::ParseError);
}

TEST_F(IoTest, PeekHeaderIdentifiesFormats) {
  io::write_point_cloud(path("c.ply"), PointCloud({{0, 0, 0}}));
  io::write_transform(path("t.txt"), AffineTransform3::identity());
  io::write_mesh(path("m.stl"), tetrahedron());
  EXPECT_EQ(io::peek_header(path("c.ply")).format, "ply");
  EXPECT_EQ(io::peek_header(path("t.txt")).format, "transform");
  EXPECT_EQ(io::peek_header(path("m.stl")).format, "stl");
}

TEST_F(IoTest, MissingFileIsParseError) {
  EXPECT_EQ(code_of([&] { io::read_point_cloud(path("nope.ply")); }), ErrorCode::ParseError);
}

TEST(IoFixtures, MalformedInputsRaiseParseError) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(CARDIOREG_FIXTURE_DIR "/malformed")) {
    const fs::path p = entry.path();
    const std::string name = p.filename().string();
    const std::string kind = name.substr(0, name.find('_'));
    ErrorCode code = static_cast<ErrorCode>(-1);
    if (kind == "ply") code = code_of([&] { io::read_point_cloud(p); });
    else if (kind == "stl") code = code_of([&] { io::read_mesh(p); });
    else if (kind == "volume") code = code_of([&] { io::read_volume(p); });
    else if (kind == "mask") code = code_of([&] { io::read_mask(p); });
    else if (kind == "transform") code = code_of([&] { io::read_transform(p); });
    else if (kind == "landmarks") code = code_of([&] { io::read_landmarks(p); });
    else continue;
    ++seen;
    EXPECT_EQ(code, ErrorCode::ParseError) << name;
  }
  EXPECT_GT(seen, 30);
}

TEST(FormatExact, ShortestRoundTrip) {
  for (double v : {0.1, -81.1, 208.9984, 1e-300, 123456789.125, 0.0}) {
    EXPECT_EQ(std::stod(io::format_exact(v)), v);
  }
  EXPECT_EQ(io::format_exact(0.4082), "0.4082");
}
