#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cardioreg/coarse.hpp"
#include "cardioreg/segmentation.hpp"

namespace cardioreg::io {

/// Identifies a file by its magic tag, version and a short payload summary.
struct FileHeader {
  std::string format;   // "ply", "stl", "volume", "mask", "transform", "landmarks"
  int version = 1;
  std::string descriptor;
};

FileHeader peek_header(const std::filesystem::path& path);

// ASCII PLY; x, y, z as double and an optional per-vertex "value" property.
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_point_cloud(const std::filesystem::path& path);
void write_point_cloud(std::ostream& os, const PointCloud& cloud);
PointCloud read_point_cloud(std::istream& is, const std::string& name = "<stream>");

// Binary little-endian STL. Vertex values, when present, go to a sidecar
// "<path>.values" aligned with the vertex order a reader reconstructs.
void write_mesh(const std::filesystem::path& path, const TriMesh& mesh);
TriMesh read_mesh(const std::filesystem::path& path);
std::filesystem::path values_sidecar(const std::filesystem::path& mesh_path);

// Text header (size, voxel extent, origin, sample type) + raw body, i fastest.
void write_volume(const std::filesystem::path& path, const Volume& vol);
Volume read_volume(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const Mask& mask);
Mask read_mask(const std::filesystem::path& path);
/// Reads only the header of a volume or mask file.
SpatialReference read_reference(const std::filesystem::path& path);

// 4x4 row-major homogeneous matrix plus kind tag.
void write_transform(const std::filesystem::path& path, const AffineTransform3& t);
AffineTransform3 read_transform(const std::filesystem::path& path);
void write_transform(std::ostream& os, const AffineTransform3& t);
AffineTransform3 read_transform(std::istream& is, const std::string& name = "<stream>");

// Two ordered groups, "anterior" then "posterior".
void write_landmarks(const std::filesystem::path& path, const LandmarkSet& set);
LandmarkSet read_landmarks(const std::filesystem::path& path);
void write_landmarks(std::ostream& os, const LandmarkSet& set);
LandmarkSet read_landmarks(std::istream& is, const std::string& name = "<stream>");

/// Shortest decimal rendering that parses back to the same double.
std::string format_exact(double v);

}  // namespace cardioreg::io
