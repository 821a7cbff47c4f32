#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cardioreg/io.hpp"
#include "cardioreg/phantom.hpp"
#include "cli.hpp"

using namespace cardioreg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cardioreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST(FormatNumber, NineSignificantDigits) {
  EXPECT_EQ(cli::format_number(0.0), "0.0");
  EXPECT_EQ(cli::format_number(3.0), "3.0");
  EXPECT_EQ(cli::format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(cli::format_number(208.9984), "208.9984");
}

TEST_F(CliTest, MetricsMdeOfSameCloudIsZero) {
  io::write_point_cloud(path("a.ply"), PointCloud({{0, 0, 0}, {1, 2, 3}, {-4, 5, 6}}));
  const auto r = run({"metrics", "--mde", path("a.ply"), path("a.ply")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.0\n");
}

TEST_F(CliTest, RegisterCpdAffineRecoversKnownAffine) {
  AffineTransform3 t;
  t.linear = rotation_about(Eigen::Vector3d(0.3, -0.2, 1.0).normalized(), 0.2) *
             Eigen::Vector3d(1.05, 0.95, 1.1).asDiagonal();
  t.translation = {5, -3, 2};
  t.kind = TransformKind::Affine;
  io::write_transform(path("truth_in.txt"), t);
  ASSERT_EQ(run({"phantom", "shell", "--cloud", path("m.ply"), "--landmarks", path("m.lmk"),
                 "--transform", path("truth_in.txt"), "--moved-cloud", path("f.ply"),
                 "--moved-landmarks", path("f.lmk")})
                .code,
            0);
  const auto r = run({"register", "--moving", path("m.ply"), "--fixed", path("f.ply"),
                      "--moving-landmarks", path("m.lmk"), "--fixed-landmarks", path("f.lmk"),
                      "--method", "cpd-affine", "--max-iterations", "1000", "--out", path("t.txt"),
                      "--report", path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.out.rfind("mde ", 0), 0u);
  EXPECT_LT(std::stod(r.out.substr(4)), 1e-3);
  EXPECT_EQ(io::read_transform(path("t.txt")).kind, TransformKind::Affine);
  EXPECT_NE(slurp(path("report.json")).find("objective_trace"), std::string::npos);
}

TEST_F(CliTest, CoarseMissingPosteriorIsParseError) {
  const auto [cloud, lm] = generate_lv_shell({});
  io::write_landmarks(path("ok.lmk"), lm);
  const auto r = run({"coarse", "--moving", path("ok.lmk"), "--fixed",
                      std::string(CARDIOREG_FIXTURE_DIR) + "/malformed/landmarks_missing_posterior.lmk",
                      "--out", path("t.txt")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("code=ParseError"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("t.txt")));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"register", "--method", "nope"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const auto r = run({"metrics", "--mde", path("missing.ply"), path("missing.ply")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("code=UsageError"), std::string::npos);
}

TEST_F(CliTest, RegisterWithoutInitOrLandmarksWarns) {
  ASSERT_EQ(run({"phantom", "shell", "--cloud", path("m.ply"), "--landmarks", path("m.lmk"),
                 "--points", "300"})
                .code,
            0);
  const auto r = run({"register", "--moving", path("m.ply"), "--fixed", path("m.ply"), "--method",
                      "icp", "--out", path("t.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  ASSERT_EQ(r.out.rfind("mde ", 0), 0u);
  EXPECT_LT(std::stod(r.out.substr(4)), 1e-9);
}

TEST_F(CliTest, PipelineIsByteDeterministic) {
  auto pipeline = [&](const std::string& tag) {
    const auto p = [&](const std::string& n) { return path(tag + "_" + n); };
    EXPECT_EQ(run({"phantom", "shell", "--cloud", p("m.ply"), "--landmarks", p("m.lmk"), "--points",
                   "600", "--seed", "11", "--random-similarity", "5", "--noise", "1.0", "--outliers",
                   "0.05", "--perturb-seed", "3", "--moved-cloud", p("f.ply"), "--moved-landmarks",
                   p("f.lmk"), "--truth", p("truth.txt")})
                  .code,
              0);
    EXPECT_EQ(run({"phantom", "volume", "--size", "16", "16", "16", "--ellipsoid", "8", "8", "8", "5",
                   "4", "6", "1000", "--out", p("v.vol")})
                  .code,
              0);
    EXPECT_EQ(run({"region-grow", "--volume", p("v.vol"), "--seed", "8", "8", "8", "--out", p("m.vol")})
                  .code,
              0);
    EXPECT_EQ(run({"surface", "--mask", p("m.vol"), "--out", p("s.stl")}).code, 0);
    EXPECT_EQ(run({"cloud", "--mask", p("m.vol"), "--out", p("c.ply")}).code, 0);
    EXPECT_EQ(run({"register", "--moving", p("m.ply"), "--fixed", p("f.ply"), "--moving-landmarks",
                   p("m.lmk"), "--fixed-landmarks", p("f.lmk"), "--method", "cpd-rigid", "--out",
                   p("t.txt"), "--report", p("r.json")})
                  .code,
              0);
    const auto cmp = run({"compare", "--moving", p("m.ply"), "--fixed", p("f.ply"), "--moving-landmarks",
                          p("m.lmk"), "--fixed-landmarks", p("f.lmk")});
    EXPECT_EQ(cmp.code, 0);
    EXPECT_EQ(run({"warp", "--volume", p("v.vol"), "--transform", p("truth.txt"), "--reference",
                   p("v.vol"), "--out", p("w.vol")})
                  .code,
              0);
    return cmp.out;
  };
  const std::string a = pipeline("a"), b = pipeline("b");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("method,mde_mm,iterations,converged\nicp,", 0), 0u);
  for (const char* f : {"m.ply", "m.lmk", "f.ply", "f.lmk", "truth.txt", "v.vol", "m.vol", "s.stl",
                        "c.ply", "t.txt", "r.json", "w.vol"}) {
    EXPECT_EQ(slurp(path(std::string("a_") + f)), slurp(path(std::string("b_") + f))) << f;
  }
}
