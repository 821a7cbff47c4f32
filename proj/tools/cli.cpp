#include "cli.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardioreg/coarse.hpp"
#include "cardioreg/cpd.hpp"
#include "cardioreg/fusion.hpp"
#include "cardioreg/icp.hpp"
#include "cardioreg/io.hpp"
#include "cardioreg/phantom.hpp"

namespace cardioreg::cli {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s(buf);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

namespace {

using nlohmann::json;

const std::map<std::string, std::string> kMethods = {
    {"icp", "icp"}, {"sicp", "sicp"}, {"cpd-rigid", "cpd-rigid"}, {"cpd-affine", "cpd-affine"}};

struct RegisterOptions {
  std::string moving, fixed, moving_landmarks, fixed_landmarks, init;
  std::string method = "cpd-affine";
  std::string out, report;
  bool no_scaling = false;
  std::size_t count = 0;
  int max_iterations = 0;
  double tolerance = 0.0;
  double outlier_weight = 0.1;
  double scale_min = 0.2, scale_max = 5.0;
  bool isotropic = false;
};

void add_register_options(CLI::App* cmd, RegisterOptions& o, bool single_method) {
  cmd->add_option("--moving", o.moving, "Moving point cloud (PLY)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--fixed", o.fixed, "Fixed point cloud (PLY)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--moving-landmarks", o.moving_landmarks, "Moving groove landmarks")
      ->check(CLI::ExistingFile);
  cmd->add_option("--fixed-landmarks", o.fixed_landmarks, "Fixed groove landmarks")
      ->check(CLI::ExistingFile);
  cmd->add_option("--init", o.init, "Initial transform file (skips coarse registration)")
      ->check(CLI::ExistingFile);
  if (single_method) {
    cmd->add_option("--method", o.method, "icp | sicp | cpd-rigid | cpd-affine")
        ->check(CLI::IsMember(kMethods));
  }
  cmd->add_flag("--no-scaling", o.no_scaling, "Rigid instead of similarity coarse registration");
  cmd->add_option("--count", o.count, "Landmarks kept per groove group");
  cmd->add_option("--max-iterations", o.max_iterations, "Iteration cap (default per method)");
  cmd->add_option("--tolerance", o.tolerance, "Relative objective tolerance (default per method)");
  cmd->add_option("--outlier-weight", o.outlier_weight, "CPD uniform outlier weight w")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--scale-min", o.scale_min, "SICP lower scale bound");
  cmd->add_option("--scale-max", o.scale_max, "SICP upper scale bound");
  cmd->add_flag("--isotropic", o.isotropic, "Tie the three SICP scales");
}

json matrix_json(const AffineTransform3& t) {
  const Eigen::Matrix4d m = t.homogeneous();
  json rows = json::array();
  for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
  return rows;
}

struct Prepared {
  PointCloud moving, fixed;
  AffineTransform3 init;
};

Prepared prepare_registration(const RegisterOptions& o, std::ostream& err) {
  Prepared p;
  p.moving = io::read_point_cloud(o.moving);
  p.fixed = io::read_point_cloud(o.fixed);
  const bool have_landmarks = !o.moving_landmarks.empty() || !o.fixed_landmarks.empty();
  if (!o.init.empty()) {
    p.init = io::read_transform(o.init);
  } else if (have_landmarks) {
    if (o.moving_landmarks.empty() || o.fixed_landmarks.empty()) {
      fail(ErrorCode::InvalidParameter, "both --moving-landmarks and --fixed-landmarks are required");
    }
    CoarseParams cp;
    cp.with_scaling = !o.no_scaling;
    if (o.count > 0) cp.target_count = o.count;
    p.init = coarse_register(io::read_landmarks(o.moving_landmarks),
                             io::read_landmarks(o.fixed_landmarks), cp);
  } else {
    err << "warning: no --init and no landmarks; fine registration starts from identity\n";
  }
  return p;
}

RegistrationResult run_method(const std::string& method, const Prepared& p,
                              const RegisterOptions& o) {
  if (method == "icp" || method == "sicp") {
    IcpParams ip;
    if (o.max_iterations > 0) ip.max_iterations = o.max_iterations;
    if (o.tolerance > 0) ip.rel_tolerance = o.tolerance;
    ip.scale_min = o.scale_min;
    ip.scale_max = o.scale_max;
    ip.isotropic_scale = o.isotropic;
    return method == "icp" ? icp(p.moving, p.fixed, p.init, ip) : sicp(p.moving, p.fixed, p.init, ip);
  }
  CpdParams cp;
  if (o.max_iterations > 0) cp.max_iterations = o.max_iterations;
  if (o.tolerance > 0) cp.tolerance = o.tolerance;
  cp.outlier_weight = o.outlier_weight;
  cp.mode = method == "cpd-rigid" ? CpdMode::Rigid : CpdMode::Affine;
  return cpd(p.moving, p.fixed, p.init, cp);
}

std::ofstream open_text(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::InvalidData, path + ": cannot open for writing");
  return f;
}

Eigen::Vector3d vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point-cloud registration and SPECT/CTA volume fusion"};
  app.name("cardioreg");
  app.require_subcommand(1);
  std::function<void()> action;

  // region-grow
  std::string rg_volume, rg_out;
  std::vector<std::array<int, 3>> rg_seeds;
  double rg_threshold = 400.0;
  int rg_conn = 6;
  auto* rg = app.add_subcommand("region-grow", "Seeded region growing -> mask");
  rg->add_option("--volume", rg_volume, "Input volume")->required()->check(CLI::ExistingFile);
  rg->add_option("--seed", rg_seeds, "Seed voxel i j k (repeatable)")->required();
  rg->add_option("--threshold", rg_threshold, "Intensity threshold T")->check(CLI::NonNegativeNumber);
  rg->add_option("--connectivity", rg_conn, "6 or 26")->check(CLI::IsMember({6, 26}));
  rg->add_option("--out", rg_out, "Output mask")->required();
  rg->callback([&] {
    action = [&] {
      const Volume vol = io::read_volume(rg_volume);
      std::vector<Index3> seeds(rg_seeds.begin(), rg_seeds.end());
      const Mask m = region_grow(vol, seeds, rg_threshold,
                                 rg_conn == 26 ? Connectivity::TwentySix : Connectivity::Six);
      io::write_mask(rg_out, m);
      out << "voxels " << m.count() << "\n";
    };
  });

  // surface
  std::string sf_mask, sf_out;
  auto* sf = app.add_subcommand("surface", "Mask -> closed STL surface");
  sf->add_option("--mask", sf_mask, "Input mask")->required()->check(CLI::ExistingFile);
  sf->add_option("--out", sf_out, "Output STL")->required();
  sf->callback([&] {
    action = [&] {
      const TriMesh mesh = extract_isosurface(io::read_mask(sf_mask));
      io::write_mesh(sf_out, mesh);
      out << "vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << "\n";
    };
  });

  // cloud
  std::string cl_mask, cl_out;
  auto* cl = app.add_subcommand("cloud", "Mask -> PLY boundary point cloud");
  cl->add_option("--mask", cl_mask, "Input mask")->required()->check(CLI::ExistingFile);
  cl->add_option("--out", cl_out, "Output PLY")->required();
  cl->callback([&] {
    action = [&] {
      const PointCloud c = mask_to_point_cloud(io::read_mask(cl_mask));
      io::write_point_cloud(cl_out, c);
      out << "points " << c.size() << "\n";
    };
  });

  // coarse
  std::string co_moving, co_fixed, co_out;
  bool co_no_scaling = false;
  std::size_t co_count = 0;
  auto* co = app.add_subcommand("coarse", "Landmark coarse registration -> transform");
  co->add_option("--moving", co_moving, "Moving landmarks")->required()->check(CLI::ExistingFile);
  co->add_option("--fixed", co_fixed, "Fixed landmarks")->required()->check(CLI::ExistingFile);
  co->add_option("--out", co_out, "Output transform")->required();
  co->add_flag("--no-scaling", co_no_scaling, "Rigid instead of similarity");
  co->add_option("--count", co_count, "Landmarks kept per groove group");
  co->callback([&] {
    action = [&] {
      CoarseParams cp;
      cp.with_scaling = !co_no_scaling;
      if (co_count > 0) cp.target_count = co_count;
      const auto moving = io::read_landmarks(co_moving);
      const auto fixed = io::read_landmarks(co_fixed);
      const auto t = coarse_register(moving, fixed, cp);
      io::write_transform(co_out, t);
    };
  });

  // register
  RegisterOptions reg;
  auto* rc = app.add_subcommand("register", "Coarse + fine point-cloud registration");
  add_register_options(rc, reg, true);
  rc->add_option("--out", reg.out, "Output transform")->required();
  rc->add_option("--report", reg.report, "JSON report (trace, iterations, mde)");
  rc->callback([&] {
    action = [&] {
      const Prepared p = prepare_registration(reg, err);
      const RegistrationResult r = run_method(reg.method, p, reg);
      io::write_transform(reg.out, r.transform);
      if (!reg.report.empty()) {
        json j;
        j["method"] = reg.method;
        j["init"] = matrix_json(p.init);
        j["transform"] = matrix_json(r.transform);
        j["kind"] = std::string(to_string(r.transform.kind));
        j["objective_trace"] = r.objective_trace;
        j["iterations"] = r.iterations;
        j["converged"] = r.converged;
        j["stop_reason"] = std::string(to_string(r.stop_reason));
        j["mde_mm"] = r.mde;
        auto f = open_text(reg.report);
        f << j.dump(2) << "\n";
      }
      out << "mde " << format_number(r.mde) << "\n";
      out << "iterations " << r.iterations << "\n";
      out << "converged " << (r.converged ? "true" : "false") << "\n";
    };
  });

  // compare
  RegisterOptions cmp;
  std::string cmp_out;
  auto* cm = app.add_subcommand("compare", "Run all four fine methods from one init -> CSV");
  add_register_options(cm, cmp, false);
  cm->add_option("--out", cmp_out, "CSV output (default: standard output)");
  cm->callback([&] {
    action = [&] {
      const Prepared p = prepare_registration(cmp, err);
      std::string csv = "method,mde_mm,iterations,converged\n";
      for (const char* m : {"icp", "sicp", "cpd-rigid", "cpd-affine"}) {
        const auto r = run_method(m, p, cmp);
        csv += std::string(m) + "," + format_number(r.mde) + "," + std::to_string(r.iterations) +
               "," + (r.converged ? "true" : "false") + "\n";
      }
      if (cmp_out.empty()) {
        out << csv;
      } else {
        auto f = open_text(cmp_out);
        f << csv;
      }
    };
  });

  // warp
  std::string wp_volume, wp_transform, wp_reference, wp_out;
  std::optional<std::array<int, 3>> wp_size;
  std::array<double, 3> wp_voxel{1, 1, 1}, wp_origin{0, 0, 0};
  float wp_fill = 0.0f;
  auto* wp = app.add_subcommand("warp", "Resample a volume into an output reference");
  wp->add_option("--volume", wp_volume, "Moving volume")->required()->check(CLI::ExistingFile);
  wp->add_option("--transform", wp_transform, "Moving-world -> output-world transform")
      ->required()->check(CLI::ExistingFile);
  auto* ref_opt = wp->add_option("--reference", wp_reference, "Volume or mask whose grid defines the output")
                      ->check(CLI::ExistingFile);
  auto* size_opt = wp->add_option("--size", wp_size, "Output size nx ny nz");
  wp->add_option("--voxel", wp_voxel, "Output voxel extent (mm)");
  wp->add_option("--origin", wp_origin, "Output origin L0 P0 S0 (mm)");
  ref_opt->excludes(size_opt);
  wp->add_option("--fill", wp_fill, "Value outside the moving field of view");
  wp->add_option("--out", wp_out, "Output volume")->required();
  wp->callback([&] {
    action = [&] {
      SpatialReference ref;
      if (!wp_reference.empty()) {
        ref = io::read_reference(wp_reference);
      } else if (wp_size) {
        ref = build_spatial_reference(*wp_size, vec3(wp_voxel), vec3(wp_origin));
      } else {
        throw CLI::ValidationError("warp", "either --reference or --size is required");
      }
      const Volume moved = warp_volume(io::read_volume(wp_volume), io::read_transform(wp_transform), ref, wp_fill);
      io::write_volume(wp_out, moved);
    };
  });

  // fuse
  std::string fu_mesh, fu_cloud, fu_volume, fu_transform, fu_out;
  auto* fu = app.add_subcommand("fuse", "Map perfusion values onto a mesh");
  fu->add_option("--mesh", fu_mesh, "Target mesh (STL)")->required()->check(CLI::ExistingFile);
  auto* fu_c = fu->add_option("--cloud", fu_cloud, "Registered valued cloud (PLY)")->check(CLI::ExistingFile);
  auto* fu_v = fu->add_option("--volume", fu_volume, "SPECT volume")->check(CLI::ExistingFile);
  fu->add_option("--transform", fu_transform, "SPECT-world -> mesh-world transform")->check(CLI::ExistingFile);
  fu_c->excludes(fu_v);
  fu->add_option("--out", fu_out, "Output STL (+ .values sidecar)")->required();
  fu->callback([&] {
    action = [&] {
      FusionInput in;
      in.mesh = io::read_mesh(fu_mesh);
      if (!fu_cloud.empty()) {
        in.source = io::read_point_cloud(fu_cloud);
      } else if (!fu_volume.empty()) {
        VolumeSource vs;
        vs.volume = io::read_volume(fu_volume);
        if (!fu_transform.empty()) vs.transform = io::read_transform(fu_transform);
        in.source = std::move(vs);
      } else {
        throw CLI::ValidationError("fuse", "either --cloud or --volume is required");
      }
      io::write_mesh(fu_out, map_mpi_to_mesh(in));
    };
  });

  // metrics
  std::vector<std::string> me_dice, me_mde;
  auto* me = app.add_subcommand("metrics", "Dice of two masks or mean distance error of two clouds");
  auto* me_d = me->add_option("--dice", me_dice, "Two mask files")->expected(2)->check(CLI::ExistingFile);
  auto* me_m = me->add_option("--mde", me_mde, "Two PLY clouds")->expected(2)->check(CLI::ExistingFile);
  me_d->excludes(me_m);
  me->callback([&] {
    action = [&] {
      if (!me_dice.empty()) {
        out << format_number(dice(io::read_mask(me_dice[0]), io::read_mask(me_dice[1]))) << "\n";
      } else if (!me_mde.empty()) {
        out << format_number(mean_distance_error(io::read_point_cloud(me_mde[0]),
                                                 io::read_point_cloud(me_mde[1])))
            << "\n";
      } else {
        throw CLI::ValidationError("metrics", "either --dice or --mde is required");
      }
    };
  });

  // phantom
  auto* ph = app.add_subcommand("phantom", "Synthetic ground-truth generators");
  ph->require_subcommand(1);
  ShellParams sp;
  std::array<double, 3> ps_axes{sp.semi_axes.x(), sp.semi_axes.y(), sp.semi_axes.z()};
  std::string ps_cloud, ps_landmarks, ps_transform, ps_moved_cloud, ps_moved_landmarks, ps_truth;
  std::optional<std::uint64_t> ps_random;
  PerturbSpec ps_perturb;
  auto* ps = ph->add_subcommand("shell", "Truncated-ellipsoid LV shell with groove landmarks");
  ps->add_option("--axes", ps_axes, "Semi-axes a b c (mm)");
  ps->add_option("--truncation", sp.truncation_fraction, "Kept fraction of the long axis");
  ps->add_option("--points", sp.point_count, "Surface point count");
  ps->add_option("--landmark-count", sp.landmark_count, "Points per groove");
  ps->add_option("--seed", sp.rng_seed, "Sampling seed");
  ps->add_option("--cloud", ps_cloud, "Output PLY")->required();
  ps->add_option("--landmarks", ps_landmarks, "Output landmarks")->required();
  auto* ps_t = ps->add_option("--transform", ps_transform, "Ground-truth transform to apply")->check(CLI::ExistingFile);
  auto* ps_r = ps->add_option("--random-similarity", ps_random, "Seed for a random similarity ground truth");
  ps_t->excludes(ps_r);
  ps->add_option("--noise", ps_perturb.noise_sigma, "Gaussian noise sigma (mm)");
  ps->add_option("--outliers", ps_perturb.outlier_fraction, "Outlier fraction")->check(CLI::Range(0.0, 0.999999));
  ps->add_option("--perturb-seed", ps_perturb.rng_seed, "Perturbation seed");
  ps->add_option("--moved-cloud", ps_moved_cloud, "Output perturbed PLY");
  ps->add_option("--moved-landmarks", ps_moved_landmarks, "Output perturbed landmarks");
  ps->add_option("--truth", ps_truth, "Output the applied ground-truth transform");
  ps->callback([&] {
    action = [&] {
      sp.semi_axes = vec3(ps_axes);
      const auto [cloud, lm] = generate_lv_shell(sp);
      io::write_point_cloud(ps_cloud, cloud);
      io::write_landmarks(ps_landmarks, lm);
      if (!ps_moved_cloud.empty() || !ps_moved_landmarks.empty() || !ps_truth.empty()) {
        if (!ps_transform.empty()) ps_perturb.transform = io::read_transform(ps_transform);
        if (ps_random) ps_perturb.transform = random_similarity(*ps_random);
        const auto [moved, moved_lm] = perturb_cloud(cloud, lm, ps_perturb);
        if (!ps_moved_cloud.empty()) io::write_point_cloud(ps_moved_cloud, moved);
        if (!ps_moved_landmarks.empty()) io::write_landmarks(ps_moved_landmarks, moved_lm);
        if (!ps_truth.empty()) io::write_transform(ps_truth, ps_perturb.transform);
      }
    };
  });

  std::array<int, 3> pv_size{64, 64, 64};
  std::array<double, 3> pv_voxel{1, 1, 1}, pv_origin{0, 0, 0};
  std::vector<std::array<double, 7>> pv_ellipsoids;
  std::string pv_out;
  auto* pv = ph->add_subcommand("volume", "Nested-ellipsoid intensity volume");
  pv->add_option("--size", pv_size, "nx ny nz");
  pv->add_option("--voxel", pv_voxel, "Voxel extent (mm)");
  pv->add_option("--origin", pv_origin, "Origin L0 P0 S0 (mm)");
  pv->add_option("--ellipsoid", pv_ellipsoids, "cx cy cz a b c intensity (repeatable)");
  pv->add_option("--out", pv_out, "Output volume")->required();
  pv->callback([&] {
    action = [&] {
      std::vector<EllipsoidShell> shells;
      for (const auto& e : pv_ellipsoids) {
        shells.push_back({Point3(e[0], e[1], e[2]), Eigen::Vector3d(e[3], e[4], e[5]),
                          static_cast<float>(e[6])});
      }
      const auto ref = build_spatial_reference(pv_size, vec3(pv_voxel), vec3(pv_origin));
      io::write_volume(pv_out, generate_phantom_volume(ref, shells));
    };
  });

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("cardioreg");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error code=UsageError message=\"" << e.what() << "\"\n";
    return kUsageError;
  }

  try {
    if (action) action();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error code=UsageError message=\"" << e.what() << "\"\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error code=" << to_string(e.code()) << " message=\"" << e.what() << "\"\n";
    switch (e.code()) {
      case ErrorCode::DegenerateConfiguration:
      case ErrorCode::NumericalCollapse:
      case ErrorCode::SingularTransform:
        return kNumericalFailure;
      default:
        return kDataError;
    }
  } catch (const std::exception& e) {
    err << "error code=InternalError message=\"" << e.what() << "\"\n";
    return kDataError;
  }
}

}  // namespace cardioreg::cli
