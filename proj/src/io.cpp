#include "cardioreg/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include <Eigen/Geometry>

namespace cardioreg::io {

namespace fs = std::filesystem;

std::string format_exact(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

class LineReader {
 public:
  LineReader(std::istream& is, std::string name) : is_(is), name_(std::move(name)) {}

  // Next line; comments ('#' first token or PLY "comment") are skipped when
  // requested. Returns nullopt at end of input.
  std::optional<std::string> next(bool skip_comments = true) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (skip_comments) {
        const auto toks = split(line);
        if (toks.empty() || toks.front().starts_with('#')) continue;
      }
      return line;
    }
    return std::nullopt;
  }

  std::string require(std::string_view what) {
    auto line = next();
    if (!line) error("unexpected end of file, expected " + std::string(what));
    return *line;
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, name_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  double number(std::string_view tok) const {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      error("expected a number, got '" + std::string(tok) + "'");
    }
    return v;
  }

  long long integer(std::string_view tok) const {
    long long v = 0;
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      error("expected an integer, got '" + std::string(tok) + "'");
    }
    return v;
  }

  std::istream& stream() { return is_; }
  int line_number() const { return line_no_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& is_;
  std::string name_;
  int line_no_ = 0;
};

std::ifstream open_in(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::ParseError, path.string() + ": cannot open for reading");
  return f;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::InvalidData, path.string() + ": cannot open for writing");
  return f;
}

void finish_write(std::ofstream& f, const fs::path& path) {
  f.flush();
  if (!f) fail(ErrorCode::InvalidData, path.string() + ": write failed");
}

std::string point_line(const Point3& p) {
  return format_exact(p.x()) + " " + format_exact(p.y()) + " " + format_exact(p.z());
}

void require_finite(const LineReader& r, const Point3& p) {
  if (!p.allFinite()) fail(ErrorCode::InvalidData, r.name() + ":" + std::to_string(r.line_number()) + ": non-finite coordinate");
}

// ---------------------------------------------------------------- PLY

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<std::string> properties;  // scalar property names; "" for lists
};

}  // namespace

void write_point_cloud(std::ostream& os, const PointCloud& cloud) {
  cloud.validate();
  os << "ply\nformat ascii 1.0\ncomment cardioreg point cloud\n";
  os << "element vertex " << cloud.size() << "\n";
  os << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_values()) os << "property double value\n";
  os << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    os << point_line(cloud.points[i]);
    if (cloud.has_values()) os << " " << format_exact((*cloud.values)[i]);
    os << "\n";
  }
}

PointCloud read_point_cloud(std::istream& is, const std::string& name) {
  LineReader r(is, name);
  auto first = r.next(false);
  if (!first || split(*first) != std::vector<std::string>{"ply"}) r.error("missing 'ply' magic");

  std::vector<PlyElement> elements;
  bool ended = false;
  bool ascii = false;
  while (auto line = r.next(false)) {
    const auto t = split(*line);
    if (t.empty()) continue;
    if (t[0] == "comment" || t[0] == "obj_info") continue;
    if (t[0] == "format") {
      if (t.size() != 3) r.error("malformed format line");
      if (t[1] != "ascii") r.error("only ascii PLY is supported, got '" + std::string(t[1]) + "'");
      ascii = true;
    } else if (t[0] == "element") {
      if (t.size() != 3) r.error("malformed element line");
      const auto count = r.integer(t[2]);
      if (count < 0) r.error("negative element count");
      elements.push_back({std::string(t[1]), count, {}});
    } else if (t[0] == "property") {
      if (elements.empty()) r.error("property before any element");
      if (t.size() == 3) {
        elements.back().properties.emplace_back(t[2]);
      } else if (t.size() == 5 && t[1] == "list") {
        elements.back().properties.emplace_back();
      } else {
        r.error("malformed property line");
      }
    } else if (t[0] == "end_header") {
      ended = true;
      break;
    } else {
      r.error("unexpected header keyword '" + std::string(t[0]) + "'");
    }
  }
  if (!ended) r.error("header not terminated by end_header");
  if (!ascii) r.error("missing format line");

  PointCloud cloud;
  bool found_vertex = false;
  for (const auto& el : elements) {
    if (el.name != "vertex") {
      for (long long i = 0; i < el.count; ++i) r.require("element '" + el.name + "' row");
      continue;
    }
    found_vertex = true;
    int ix = -1, iy = -1, iz = -1, iv = -1;
    for (int p = 0; p < static_cast<int>(el.properties.size()); ++p) {
      const auto& n = el.properties[p];
      if (n.empty()) r.error("list properties are not supported on vertices");
      if (n == "x") ix = p;
      if (n == "y") iy = p;
      if (n == "z") iz = p;
      if (n == "value") iv = p;
    }
    if (ix < 0 || iy < 0 || iz < 0) r.error("vertex element lacks x, y, z properties");
    cloud.points.reserve(static_cast<std::size_t>(el.count));
    if (iv >= 0) cloud.values.emplace().reserve(static_cast<std::size_t>(el.count));
    for (long long i = 0; i < el.count; ++i) {
      const auto line = r.require("vertex row");
      const auto t = split(line);
      if (t.size() != el.properties.size()) {
        r.error("vertex row has " + std::to_string(t.size()) + " fields, expected " +
                std::to_string(el.properties.size()));
      }
      const Point3 p(r.number(t[ix]), r.number(t[iy]), r.number(t[iz]));
      require_finite(r, p);
      cloud.points.push_back(p);
      if (iv >= 0) {
        const double v = r.number(t[iv]);
        if (!std::isfinite(v)) fail(ErrorCode::InvalidData, name + ": non-finite value");
        cloud.values->push_back(v);
      }
    }
  }
  if (!found_vertex) r.error("no vertex element");
  return cloud;
}

void write_point_cloud(const fs::path& path, const PointCloud& cloud) {
  auto f = open_out(path);
  write_point_cloud(f, cloud);
  finish_write(f, path);
}

PointCloud read_point_cloud(const fs::path& path) {
  auto f = open_in(path);
  return read_point_cloud(f, path.string());
}

// ---------------------------------------------------------------- STL

namespace {

constexpr std::size_t kStlHeader = 80;
constexpr std::size_t kStlRecord = 50;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}
void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

using FloatKey = std::array<std::uint32_t, 3>;

FloatKey key_of(float x, float y, float z) {
  // +0 and -0 are the same coordinate.
  auto bits = [](float v) { return std::bit_cast<std::uint32_t>(v == 0.0f ? 0.0f : v); };
  return {bits(x), bits(y), bits(z)};
}

std::string read_all(const fs::path& path) {
  auto f = open_in(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

fs::path values_sidecar(const fs::path& mesh_path) {
  fs::path p = mesh_path;
  p += ".values";
  return p;
}

void write_mesh(const fs::path& path, const TriMesh& mesh) {
  if (mesh.triangles.empty()) fail(ErrorCode::EmptyInput, "write_mesh: mesh has no triangles");
  mesh.validate();

  std::string out;
  out.reserve(kStlHeader + 4 + kStlRecord * mesh.triangles.size());
  std::string header = "cardioreg binary STL";
  header.resize(kStlHeader, ' ');
  out += header;
  put_u32(out, static_cast<std::uint32_t>(mesh.triangles.size()));

  // Vertex order a reader will reconstruct: first appearance of each float
  // coordinate triple while scanning triangles.
  std::map<FloatKey, std::size_t> seen;
  std::vector<double> sidecar;
  for (const auto& tri : mesh.triangles) {
    std::array<Eigen::Vector3f, 3> v;
    for (int c = 0; c < 3; ++c) v[c] = mesh.vertices[tri[c]].cast<float>();
    Eigen::Vector3f n = (v[1] - v[0]).cross(v[2] - v[0]);
    if (n.norm() > 0.0f) n.normalize();
    for (int a = 0; a < 3; ++a) put_f32(out, n[a]);
    for (int c = 0; c < 3; ++c) {
      for (int a = 0; a < 3; ++a) put_f32(out, v[c][a]);
      const auto [it, inserted] = seen.try_emplace(key_of(v[c][0], v[c][1], v[c][2]), seen.size());
      if (inserted && mesh.vertex_values) sidecar.push_back((*mesh.vertex_values)[tri[c]]);
    }
    out.push_back('\0');
    out.push_back('\0');
  }

  auto f = open_out(path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  finish_write(f, path);

  const auto side = values_sidecar(path);
  if (mesh.vertex_values) {
    auto s = open_out(side);
    s << "cardioreg-values 1\ncount " << sidecar.size() << "\n";
    for (double v : sidecar) s << format_exact(v) << "\n";
    finish_write(s, side);
  } else if (fs::exists(side)) {
    fs::remove(side);
  }
}

TriMesh read_mesh(const fs::path& path) {
  const std::string bytes = read_all(path);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < kStlHeader + 4) {
    fail(ErrorCode::ParseError, path.string() + ": file too short for a binary STL header");
  }
  const std::uint64_t count = get_u32(data + kStlHeader);
  const std::uint64_t expected = kStlHeader + 4 + kStlRecord * count;
  if (bytes.size() != expected) {
    fail(ErrorCode::ParseError, path.string() + ": declares " + std::to_string(count) +
                                    " triangles (" + std::to_string(expected) + " bytes) but has " +
                                    std::to_string(bytes.size()) + " bytes");
  }

  TriMesh mesh;
  std::map<FloatKey, std::uint32_t> index;
  mesh.triangles.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) {
    const unsigned char* rec = data + kStlHeader + 4 + kStlRecord * t;
    std::array<std::uint32_t, 3> tri{};
    for (int c = 0; c < 3; ++c) {
      const unsigned char* v = rec + 12 + 12 * c;
      const float x = get_f32(v), y = get_f32(v + 4), z = get_f32(v + 8);
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        fail(ErrorCode::InvalidData, path.string() + ": non-finite vertex in triangle " + std::to_string(t));
      }
      const auto [it, inserted] =
          index.try_emplace(key_of(x, y, z), static_cast<std::uint32_t>(mesh.vertices.size()));
      if (inserted) mesh.vertices.emplace_back(x, y, z);
      tri[c] = it->second;
    }
    mesh.triangles.push_back(tri);
  }

  const auto side = values_sidecar(path);
  if (fs::exists(side)) {
    auto f = open_in(side);
    LineReader r(f, side.string());
    const auto magic = split(r.require("values magic"));
    if (magic.size() != 2 || magic[0] != "cardioreg-values" || magic[1] != "1") {
      r.error("bad values sidecar magic");
    }
    const auto cnt = split(r.require("count line"));
    if (cnt.size() != 2 || cnt[0] != "count") r.error("expected 'count <n>'");
    const auto n = r.integer(cnt[1]);
    if (n != static_cast<long long>(mesh.vertices.size())) {
      r.error("sidecar has " + std::to_string(n) + " values for " +
              std::to_string(mesh.vertices.size()) + " vertices");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
      const auto t = split(r.require("value"));
      if (t.size() != 1) r.error("expected one value per line");
      values.push_back(r.number(t[0]));
    }
    mesh.vertex_values = std::move(values);
  }
  return mesh;
}

// ---------------------------------------------------------------- volumes

namespace {

enum class SampleType { Float32, UInt8 };

struct VolumeHeader {
  SpatialReference ref;
  SampleType type = SampleType::Float32;
};

void write_grid(const fs::path& path, const SpatialReference& ref, SampleType type,
                const std::string& body) {
  std::string head;
  head += "cardioreg-volume 1\n";
  head += "size " + std::to_string(ref.image_size()[0]) + " " + std::to_string(ref.image_size()[1]) +
          " " + std::to_string(ref.image_size()[2]) + "\n";
  head += "voxel " + point_line(ref.pixel_extent()) + "\n";
  head += "origin " + point_line(ref.origin()) + "\n";
  head += std::string("type ") + (type == SampleType::Float32 ? "float32-le" : "uint8") + "\n";
  head += "end_header\n";
  auto f = open_out(path);
  f.write(head.data(), static_cast<std::streamsize>(head.size()));
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  finish_write(f, path);
}

VolumeHeader read_grid_header(LineReader& r) {
  const auto magic = split(r.require("volume magic"));
  if (magic.size() != 2 || magic[0] != "cardioreg-volume") r.error("missing 'cardioreg-volume' magic");
  if (magic[1] != "1") r.error("unsupported volume version '" + std::string(magic[1]) + "'");

  std::optional<Index3> size;
  std::optional<Point3> voxel, origin;
  std::optional<SampleType> type;
  for (;;) {
    const auto line = r.require("end_header");
    const auto t = split(line);
    if (t[0] == "end_header") break;
    auto triple = [&]() {
      if (t.size() != 4) r.error("'" + std::string(t[0]) + "' needs three values");
      return Point3(r.number(t[1]), r.number(t[2]), r.number(t[3]));
    };
    if (t[0] == "size") {
      if (t.size() != 4) r.error("'size' needs three values");
      Index3 s{};
      for (int a = 0; a < 3; ++a) {
        const auto v = r.integer(t[a + 1]);
        if (v < 1 || v > (1 << 20)) r.error("image size out of range");
        s[a] = static_cast<int>(v);
      }
      size = s;
    } else if (t[0] == "voxel") {
      voxel = triple();
    } else if (t[0] == "origin") {
      origin = triple();
    } else if (t[0] == "type") {
      if (t.size() != 2) r.error("'type' needs one value");
      if (t[1] == "float32-le") type = SampleType::Float32;
      else if (t[1] == "uint8") type = SampleType::UInt8;
      else r.error("unknown sample type '" + std::string(t[1]) + "'");
    } else {
      r.error("unknown header key '" + std::string(t[0]) + "'");
    }
  }
  if (!size || !voxel || !origin || !type) r.error("header lacks size, voxel, origin or type");
  VolumeHeader h;
  try {
    h.ref = build_spatial_reference(*size, *voxel, *origin);
  } catch (const Error& e) {
    r.error(e.what());
  }
  h.type = *type;
  return h;
}

std::string read_body(std::istream& is) {
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

void write_volume(const fs::path& path, const Volume& vol) {
  vol.validate();
  std::string body;
  body.reserve(vol.data.size() * 4);
  for (float v : vol.data) put_f32(body, v);
  write_grid(path, vol.ref, SampleType::Float32, body);
}

Volume read_volume(const fs::path& path) {
  auto f = open_in(path);
  LineReader r(f, path.string());
  const auto h = read_grid_header(r);
  if (h.type != SampleType::Float32) r.error("expected float32-le samples");
  const std::string body = read_body(f);
  const std::size_t n = h.ref.voxel_count();
  if (body.size() != 4 * n) {
    r.error("body has " + std::to_string(body.size()) + " bytes, header implies " + std::to_string(4 * n));
  }
  Volume vol(h.ref);
  const auto* p = reinterpret_cast<const unsigned char*>(body.data());
  for (std::size_t i = 0; i < n; ++i) {
    vol.data[i] = get_f32(p + 4 * i);
    if (!std::isfinite(vol.data[i])) {
      fail(ErrorCode::InvalidData, path.string() + ": non-finite sample at voxel " + std::to_string(i));
    }
  }
  return vol;
}

void write_mask(const fs::path& path, const Mask& mask) {
  if (mask.data.size() != mask.ref.voxel_count()) {
    fail(ErrorCode::InvalidData, "mask data length does not match its image size");
  }
  std::string body(mask.data.size(), '\0');
  for (std::size_t i = 0; i < mask.data.size(); ++i) body[i] = mask.data[i] ? 1 : 0;
  write_grid(path, mask.ref, SampleType::UInt8, body);
}

Mask read_mask(const fs::path& path) {
  auto f = open_in(path);
  LineReader r(f, path.string());
  const auto h = read_grid_header(r);
  if (h.type != SampleType::UInt8) r.error("expected uint8 mask samples");
  const std::string body = read_body(f);
  const std::size_t n = h.ref.voxel_count();
  if (body.size() != n) {
    r.error("body has " + std::to_string(body.size()) + " bytes, header implies " + std::to_string(n));
  }
  Mask mask(h.ref);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<unsigned char>(body[i]);
    if (v > 1) fail(ErrorCode::InvalidData, path.string() + ": mask sample not 0 or 1 at voxel " + std::to_string(i));
    mask.data[i] = v;
  }
  return mask;
}

SpatialReference read_reference(const fs::path& path) {
  auto f = open_in(path);
  LineReader r(f, path.string());
  return read_grid_header(r).ref;
}

// ---------------------------------------------------------------- transforms

void write_transform(std::ostream& os, const AffineTransform3& t) {
  if (!t.linear.allFinite() || !t.translation.allFinite()) {
    fail(ErrorCode::InvalidData, "write_transform: non-finite entries");
  }
  const Eigen::Matrix4d m = t.homogeneous();
  os << "cardioreg-transform 1\n";
  os << "kind " << to_string(t.kind) << "\n";
  for (int r = 0; r < 4; ++r) {
    os << format_exact(m(r, 0)) << " " << format_exact(m(r, 1)) << " " << format_exact(m(r, 2))
       << " " << format_exact(m(r, 3)) << "\n";
  }
}

AffineTransform3 read_transform(std::istream& is, const std::string& name) {
  LineReader r(is, name);
  const auto magic = split(r.require("transform magic"));
  if (magic.size() != 2 || magic[0] != "cardioreg-transform") r.error("missing 'cardioreg-transform' magic");
  if (magic[1] != "1") r.error("unsupported transform version");
  const auto kind_line = split(r.require("kind line"));
  if (kind_line.size() != 2 || kind_line[0] != "kind") r.error("expected 'kind <name>'");
  TransformKind kind;
  try {
    kind = transform_kind_from_string(kind_line[1]);
  } catch (const Error&) {
    r.error("unknown transform kind '" + std::string(kind_line[1]) + "'");
  }
  Eigen::Matrix4d m;
  for (int row = 0; row < 4; ++row) {
    const auto line = r.next();
    if (!line) r.error("matrix has " + std::to_string(row) + " rows, expected 4");
    const auto t = split(*line);
    if (t.size() != 4) r.error("matrix row has " + std::to_string(t.size()) + " entries, expected 4");
    for (int c = 0; c < 4; ++c) m(row, c) = r.number(t[c]);
  }
  if (r.next()) r.error("trailing content after 4x4 matrix");
  if (!m.allFinite()) fail(ErrorCode::InvalidData, name + ": non-finite matrix entry");
  return AffineTransform3::from_homogeneous(m, kind);
}

void write_transform(const fs::path& path, const AffineTransform3& t) {
  auto f = open_out(path);
  write_transform(f, t);
  finish_write(f, path);
}

AffineTransform3 read_transform(const fs::path& path) {
  auto f = open_in(path);
  return read_transform(f, path.string());
}

// ---------------------------------------------------------------- landmarks

void write_landmarks(std::ostream& os, const LandmarkSet& set) {
  os << "cardioreg-landmarks 1\n";
  os << "anterior " << set.anterior.size() << "\n";
  for (const auto& p : set.anterior) os << point_line(p) << "\n";
  os << "posterior " << set.posterior.size() << "\n";
  for (const auto& p : set.posterior) os << point_line(p) << "\n";
}

LandmarkSet read_landmarks(std::istream& is, const std::string& name) {
  LineReader r(is, name);
  const auto magic = split(r.require("landmarks magic"));
  if (magic.size() != 2 || magic[0] != "cardioreg-landmarks") r.error("missing 'cardioreg-landmarks' magic");
  if (magic[1] != "1") r.error("unsupported landmarks version");

  LandmarkSet set;
  auto read_group = [&](std::string_view label, std::vector<Point3>& out) {
    const auto t = split(r.require(std::string("'") + std::string(label) + "' group"));
    if (t.size() != 2 || t[0] != label) {
      r.error("expected '" + std::string(label) + " <count>'");
    }
    const auto n = r.integer(t[1]);
    if (n < 0) r.error("negative group size");
    for (long long i = 0; i < n; ++i) {
      const auto row = split(r.require("landmark point"));
      if (row.size() != 3) r.error("landmark row needs three coordinates");
      const Point3 p(r.number(row[0]), r.number(row[1]), r.number(row[2]));
      require_finite(r, p);
      out.push_back(p);
    }
  };
  read_group("anterior", set.anterior);
  read_group("posterior", set.posterior);
  if (r.next()) r.error("trailing content after posterior group");
  return set;
}

void write_landmarks(const fs::path& path, const LandmarkSet& set) {
  auto f = open_out(path);
  write_landmarks(f, set);
  finish_write(f, path);
}

LandmarkSet read_landmarks(const fs::path& path) {
  auto f = open_in(path);
  return read_landmarks(f, path.string());
}

// ---------------------------------------------------------------- sniffing

FileHeader peek_header(const fs::path& path) {
  auto f = open_in(path);
  std::array<char, 84> buf{};
  f.read(buf.data(), buf.size());
  const auto got = static_cast<std::size_t>(f.gcount());
  const std::string_view head(buf.data(), got);
  auto first_line = [&]() { return head.substr(0, head.find('\n')); };

  if (head.starts_with("ply")) return {"ply", 1, "ascii point cloud"};
  if (head.starts_with("cardioreg-volume")) {
    const auto ref_mask = [&]() {
      std::ifstream g(path, std::ios::binary);
      LineReader r(g, path.string());
      return read_grid_header(r).type == SampleType::UInt8;
    }();
    return {ref_mask ? "mask" : "volume", 1, std::string(first_line())};
  }
  if (head.starts_with("cardioreg-transform")) return {"transform", 1, "4x4 homogeneous"};
  if (head.starts_with("cardioreg-landmarks")) return {"landmarks", 1, "anterior/posterior"};
  if (got == 84) {
    const auto count = get_u32(reinterpret_cast<const unsigned char*>(buf.data()) + kStlHeader);
    return {"stl", 1, "binary, " + std::to_string(count) + " triangles"};
  }
  fail(ErrorCode::ParseError, path.string() + ": unrecognised file format");
}

}  // namespace cardioreg::io
