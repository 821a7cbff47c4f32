#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cardioreg/coarse.hpp"
#include "cardioreg/cpd.hpp"
#include "cardioreg/error.hpp"
#include "cardioreg/fusion.hpp"
#include "cardioreg/icp.hpp"
#include "cardioreg/io.hpp"
#include "cardioreg/phantom.hpp"
#include "cardioreg/segmentation.hpp"
#include "cardioreg/volume.hpp"

namespace py = pybind11;
using namespace cardioreg;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Matrix4 = Eigen::Matrix4d;

std::vector<Point3> to_points(const Points& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("expected an (N, 3) array of points");
  const auto r = a.unchecked<2>();
  std::vector<Point3> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[static_cast<std::size_t>(i)] = {r(i, 0), r(i, 1), r(i, 2)};
  return out;
}

py::array_t<double> from_points(const std::vector<Point3>& pts) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int a = 0; a < 3; ++a) w(static_cast<py::ssize_t>(i), a) = pts[i][a];
  return out;
}

PointCloud to_cloud(const Points& a, std::optional<std::vector<double>> values = std::nullopt) {
  PointCloud c(to_points(a));
  if (values) c.values = std::move(*values);
  return c;
}

AffineTransform3 to_transform(const Matrix4& m) {
  return AffineTransform3::from_homogeneous(m, TransformKind::Affine);
}

LandmarkSet to_landmarks(const Points& anterior, const Points& posterior) {
  return {to_points(anterior), to_points(posterior)};
}

py::tuple from_landmarks(const LandmarkSet& s) {
  return py::make_tuple(from_points(s.anterior), from_points(s.posterior));
}

// Voxel arrays are exposed as (nz, ny, nx) so that i varies fastest in memory.
template <typename T>
py::array_t<T> grid_array(const SpatialReference& r, const std::vector<T>& data) {
  const auto& n = r.image_size();
  py::array_t<T> out({n[2], n[1], n[0]});
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

template <typename T>
std::vector<T> grid_data(const SpatialReference& r, const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  const auto& n = r.image_size();
  if (a.ndim() != 3 || a.shape(0) != n[2] || a.shape(1) != n[1] || a.shape(2) != n[0])
    throw py::value_error("array shape must be (nz, ny, nx) of the spatial reference");
  return {a.data(), a.data() + a.size()};
}

RegistrationResult register_clouds(const Points& moving, const Points& fixed, const std::string& method,
                                   const std::optional<Matrix4>& init, std::optional<int> max_iterations,
                                   std::optional<double> tolerance, double outlier_weight,
                                   double scale_min, double scale_max, bool isotropic_scale) {
  const PointCloud m = to_cloud(moving), f = to_cloud(fixed);
  const AffineTransform3 start = init ? to_transform(*init) : AffineTransform3::identity();
  if (method == "icp" || method == "sicp") {
    IcpParams p;
    if (max_iterations) p.max_iterations = *max_iterations;
    if (tolerance) p.rel_tolerance = *tolerance;
    p.scale_min = scale_min;
    p.scale_max = scale_max;
    p.isotropic_scale = isotropic_scale;
    py::gil_scoped_release release;
    return method == "icp" ? icp(m, f, start, p) : sicp(m, f, start, p);
  }
  CpdParams p;
  if (method == "cpd-rigid") {
    p.mode = CpdMode::Rigid;
  } else if (method == "cpd-affine") {
    p.mode = CpdMode::Affine;
  } else {
    throw py::value_error("method must be one of icp, sicp, cpd-rigid, cpd-affine");
  }
  if (max_iterations) p.max_iterations = *max_iterations;
  if (tolerance) p.tolerance = *tolerance;
  p.outlier_weight = outlier_weight;
  py::gil_scoped_release release;
  return cpd(m, f, start, p);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coarse-to-fine point cloud registration and volume fusion.";

  static py::handle error_type = py::exception<Error>(m, "CardioregError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(std::string(to_string(e.code())) + ": " + e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<RegistrationResult>(m, "RegistrationResult")
      .def_property_readonly("transform", [](const RegistrationResult& r) { return r.transform.homogeneous(); })
      .def_property_readonly("kind", [](const RegistrationResult& r) { return std::string(to_string(r.transform.kind)); })
      .def_readonly("objective_trace", &RegistrationResult::objective_trace)
      .def_readonly("iterations", &RegistrationResult::iterations)
      .def_readonly("converged", &RegistrationResult::converged)
      .def_property_readonly("stop_reason", [](const RegistrationResult& r) { return std::string(to_string(r.stop_reason)); })
      .def_readonly("mde", &RegistrationResult::mde)
      .def_readonly("sigma2", &RegistrationResult::sigma2)
      .def("__repr__", [](const RegistrationResult& r) {
        return "<RegistrationResult mde=" + std::to_string(r.mde) + " iterations=" + std::to_string(r.iterations) +
               (r.converged ? " converged>" : " not converged>");
      });

  py::class_<SpatialReference>(m, "SpatialReference")
      .def(py::init([](const Index3& size, const Eigen::Vector3d& voxel, const Eigen::Vector3d& origin) {
             return build_spatial_reference(size, voxel, origin);
           }),
           py::arg("size"), py::arg("voxel"), py::arg("origin"))
      .def_property_readonly("size", &SpatialReference::image_size)
      .def_property_readonly("voxel", &SpatialReference::pixel_extent)
      .def_property_readonly("origin", &SpatialReference::origin)
      .def_property_readonly("extent", &SpatialReference::image_extent)
      .def("world_limits", &SpatialReference::world_limits, py::arg("axis"))
      .def("voxel_to_world", [](const SpatialReference& r, const Index3& idx) { return voxel_to_world(r, idx); })
      .def(py::self == py::self);

  py::class_<Volume>(m, "Volume")
      .def(py::init([](const SpatialReference& r, std::optional<py::array_t<float, py::array::c_style | py::array::forcecast>> data) {
             Volume v(r);
             if (data) v.data = grid_data<float>(r, *data);
             return v;
           }),
           py::arg("ref"), py::arg("data") = py::none())
      .def_readonly("ref", &Volume::ref)
      .def_property(
          "data", [](const Volume& v) { return grid_array(v.ref, v.data); },
          [](Volume& v, const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
            v.data = grid_data<float>(v.ref, a);
          })
      .def("sample", [](const Volume& v, const Eigen::Vector3d& p) { return sample_trilinear(v, p); });

  py::class_<Mask>(m, "Mask")
      .def(py::init([](const SpatialReference& r, std::optional<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>> data) {
             Mask k(r);
             if (data) {
               k.data = grid_data<std::uint8_t>(r, *data);
               for (auto& b : k.data) b = b != 0;
             }
             return k;
           }),
           py::arg("ref"), py::arg("data") = py::none())
      .def_readonly("ref", &Mask::ref)
      .def_property_readonly("data", [](const Mask& k) { return grid_array(k.ref, k.data).attr("astype")("bool"); })
      .def("count", &Mask::count);

  // registration
  m.def("umeyama", [](const Points& src, const Points& dst, bool with_scaling) {
        return estimate_umeyama(to_points(src), to_points(dst), with_scaling).homogeneous();
      }, py::arg("src"), py::arg("dst"), py::arg("with_scaling") = true);
  m.def("coarse_register",
        [](const Points& moving_anterior, const Points& moving_posterior, const Points& fixed_anterior,
           const Points& fixed_posterior, bool with_scaling, std::optional<std::size_t> count) {
          CoarseParams p;
          p.with_scaling = with_scaling;
          p.target_count = count;
          return coarse_register(to_landmarks(moving_anterior, moving_posterior),
                                 to_landmarks(fixed_anterior, fixed_posterior), p)
              .homogeneous();
        },
        py::arg("moving_anterior"), py::arg("moving_posterior"), py::arg("fixed_anterior"),
        py::arg("fixed_posterior"), py::arg("with_scaling") = true, py::arg("count") = py::none());
  m.def("register", &register_clouds, py::arg("moving"), py::arg("fixed"), py::arg("method") = "cpd-affine",
        py::arg("init") = py::none(), py::arg("max_iterations") = py::none(), py::arg("tolerance") = py::none(),
        py::arg("outlier_weight") = 0.1, py::arg("scale_min") = 0.2, py::arg("scale_max") = 5.0,
        py::arg("isotropic_scale") = false);
  m.def("apply_transform", [](const Points& pts, const Matrix4& t) {
        return from_points(apply_transform(to_points(pts), to_transform(t)));
      }, py::arg("points"), py::arg("transform"));

  // evaluation
  m.def("mean_distance_error", [](const Points& a, const Points& b) {
        return mean_distance_error(to_cloud(a), to_cloud(b));
      }, py::arg("src"), py::arg("dst"));
  m.def("nearest_neighbors", [](const Points& query, const Points& target) {
        const auto pairs = nearest_neighbors(to_cloud(query), to_cloud(target));
        py::array_t<std::int64_t> idx(static_cast<py::ssize_t>(pairs.size()));
        py::array_t<double> dist(static_cast<py::ssize_t>(pairs.size()));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          idx.mutable_data()[i] = static_cast<std::int64_t>(pairs[i].dst_index);
          dist.mutable_data()[i] = pairs[i].distance;
        }
        return py::make_tuple(idx, dist);
      }, py::arg("query"), py::arg("target"));
  m.def("dice", &dice, py::arg("a"), py::arg("b"));

  // volumes and segmentation
  m.def("warp_volume", [](const Volume& v, const Matrix4& t, const SpatialReference& out, float fill) {
        py::gil_scoped_release release;
        return warp_volume(v, to_transform(t), out, fill);
      }, py::arg("volume"), py::arg("transform"), py::arg("reference"), py::arg("fill") = 0.0f);
  m.def("region_grow", [](const Volume& v, const std::vector<Index3>& seeds, double threshold, int connectivity) {
        if (connectivity != 6 && connectivity != 26) throw py::value_error("connectivity must be 6 or 26");
        return region_grow(v, seeds, threshold, connectivity == 6 ? Connectivity::Six : Connectivity::TwentySix);
      }, py::arg("volume"), py::arg("seeds"), py::arg("threshold") = 400.0, py::arg("connectivity") = 6);
  m.def("extract_isosurface", [](const Mask& k) {
        const TriMesh mesh = extract_isosurface(k);
        py::array_t<std::uint32_t> tri({static_cast<py::ssize_t>(mesh.triangles.size()), py::ssize_t{3}});
        auto w = tri.mutable_unchecked<2>();
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
          for (int c = 0; c < 3; ++c) w(static_cast<py::ssize_t>(t), c) = mesh.triangles[t][c];
        return py::make_tuple(from_points(mesh.vertices), tri);
      }, py::arg("mask"));
  m.def("mask_to_point_cloud", [](const Mask& k) { return from_points(mask_to_point_cloud(k).points); },
        py::arg("mask"));
  m.def("map_values_to_vertices", [](const Points& vertices, const Points& cloud, std::vector<double> values) {
        TriMesh mesh;
        mesh.vertices = to_points(vertices);
        return *map_mpi_to_mesh({std::move(mesh), to_cloud(cloud, std::move(values))}).vertex_values;
      }, py::arg("vertices"), py::arg("cloud"), py::arg("values"));

  // phantoms
  m.def("generate_lv_shell",
        [](const Eigen::Vector3d& semi_axes, double truncation, int points, int landmark_count, std::uint64_t seed) {
          ShellParams p;
          p.semi_axes = semi_axes;
          p.truncation_fraction = truncation;
          p.point_count = points;
          p.landmark_count = landmark_count;
          p.rng_seed = seed;
          const auto [cloud, lm] = generate_lv_shell(p);
          return py::make_tuple(from_points(cloud.points), from_points(lm.anterior), from_points(lm.posterior));
        },
        py::arg("semi_axes") = Eigen::Vector3d(25.0, 22.0, 40.0), py::arg("truncation") = 0.8,
        py::arg("points") = 2000, py::arg("landmark_count") = 12, py::arg("seed") = 1);
  m.def("perturb_cloud",
        [](const Points& cloud, const Points& anterior, const Points& posterior, const Matrix4& t,
           double noise, double outliers, std::uint64_t seed) {
          PerturbSpec s;
          s.transform = to_transform(t);
          s.noise_sigma = noise;
          s.outlier_fraction = outliers;
          s.rng_seed = seed;
          const auto [c, lm] = perturb_cloud(to_cloud(cloud), to_landmarks(anterior, posterior), s);
          return py::make_tuple(from_points(c.points), from_points(lm.anterior), from_points(lm.posterior));
        },
        py::arg("cloud"), py::arg("anterior"), py::arg("posterior"), py::arg("transform"),
        py::arg("noise") = 0.0, py::arg("outliers") = 0.0, py::arg("seed") = 1);
  m.def("random_similarity", [](std::uint64_t seed) { return random_similarity(seed).homogeneous(); },
        py::arg("seed"));

  // files
  m.def("read_point_cloud", [](const std::filesystem::path& p) {
        const PointCloud c = io::read_point_cloud(p);
        return py::make_tuple(from_points(c.points), c.values ? py::cast(*c.values) : py::none());
      }, py::arg("path"));
  m.def("write_point_cloud",
        [](const std::filesystem::path& p, const Points& pts, std::optional<std::vector<double>> values) {
          io::write_point_cloud(p, to_cloud(pts, std::move(values)));
        },
        py::arg("path"), py::arg("points"), py::arg("values") = py::none());
  m.def("read_transform", [](const std::filesystem::path& p) { return io::read_transform(p).homogeneous(); },
        py::arg("path"));
  m.def("write_transform", [](const std::filesystem::path& p, const Matrix4& t) { io::write_transform(p, to_transform(t)); },
        py::arg("path"), py::arg("transform"));
  m.def("read_landmarks", [](const std::filesystem::path& p) { return from_landmarks(io::read_landmarks(p)); },
        py::arg("path"));
  m.def("write_landmarks", [](const std::filesystem::path& p, const Points& anterior, const Points& posterior) {
        io::write_landmarks(p, to_landmarks(anterior, posterior));
      }, py::arg("path"), py::arg("anterior"), py::arg("posterior"));
  m.def("read_volume", py::overload_cast<const std::filesystem::path&>(&io::read_volume), py::arg("path"));
  m.def("write_volume", py::overload_cast<const std::filesystem::path&, const Volume&>(&io::write_volume),
        py::arg("path"), py::arg("volume"));
  m.def("read_mask", py::overload_cast<const std::filesystem::path&>(&io::read_mask), py::arg("path"));
  m.def("write_mask", py::overload_cast<const std::filesystem::path&, const Mask&>(&io::write_mask),
        py::arg("path"), py::arg("mask"));
}
