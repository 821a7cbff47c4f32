#include "cardioreg/fusion.hpp"

#include <cmath>

#include "cardioreg/kdtree.hpp"

namespace cardioreg {

TriMesh map_mpi_to_mesh(const FusionInput& input) {
  const TriMesh& mesh = input.mesh;
  if (mesh.vertices.empty()) fail(ErrorCode::EmptyInput, "fusion: mesh has no vertices");
  TriMesh out = mesh;
  std::vector<double> values(mesh.vertices.size(), 0.0);

  if (const auto* cloud = std::get_if<PointCloud>(&input.source)) {
    if (cloud->empty()) fail(ErrorCode::EmptyInput, "fusion: source cloud is empty");
    if (!cloud->has_values()) {
      fail(ErrorCode::InvalidParameter, "fusion: source cloud carries no values");
    }
    cloud->validate();
    const KdTree tree(cloud->points);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      values[v] = (*cloud->values)[tree.nearest(mesh.vertices[v]).index];
    }
  } else {
    const auto& src = std::get<VolumeSource>(input.source);
    const AffineTransform3 inv = invert(src.transform);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      values[v] = sample_trilinear(src.volume, inv(mesh.vertices[v])).value_or(0.0);
    }
  }
  out.vertex_values = std::move(values);
  return out;
}

double dice(const Mask& a, const Mask& b) {
  if (a.ref.image_size() != b.ref.image_size() || a.data.size() != b.data.size()) {
    fail(ErrorCode::ShapeMismatch, "dice: masks have different dimensions");
  }
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool x = a.data[i] != 0, y = b.data[i] != 0;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double mean_distance_error(const PointCloud& src, const PointCloud& dst) {
  if (src.empty() || dst.empty()) fail(ErrorCode::EmptyInput, "mean_distance_error: empty cloud");
  const bool src_drives = src.size() <= dst.size();
  const PointCloud& query = src_drives ? src : dst;
  const PointCloud& target = src_drives ? dst : src;
  const KdTree tree(target.points);
  double sum = 0.0;
  for (const auto& p : query.points) sum += std::sqrt(tree.nearest(p).squared_distance);
  return sum / static_cast<double>(query.size());
}

}  // namespace cardioreg
