#include "cardioreg/segmentation.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>

namespace cardioreg {

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

void TriMesh::validate() const {
  const auto n = vertices.size();
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (auto v : tri) {
      if (v >= n) fail(ErrorCode::InvalidData, "triangle " + std::to_string(t) + " index out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      fail(ErrorCode::InvalidData, "triangle " + std::to_string(t) + " is degenerate");
    }
  }
  if (vertex_values && vertex_values->size() != n) {
    fail(ErrorCode::InvalidData, "vertex value count does not match vertex count");
  }
}

namespace {

std::vector<Index3> neighbour_offsets(Connectivity c) {
  if (c == Connectivity::Six) {
    return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  }
  std::vector<Index3> out;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (di != 0 || dj != 0 || dk != 0) out.push_back({di, dj, dk});
  return out;
}

}  // namespace

Mask region_grow(const Volume& vol, std::span<const Index3> seeds, double threshold,
                 Connectivity connectivity) {
  if (seeds.empty()) fail(ErrorCode::EmptyInput, "region_grow: no seeds");
  if (!(threshold >= 0.0)) fail(ErrorCode::InvalidParameter, "region_grow: threshold must be >= 0");
  const auto& ref = vol.ref;
  for (const auto& s : seeds) {
    if (!ref.contains(s)) {
      fail(ErrorCode::IndexOutOfBounds,
           "region_grow: seed (" + std::to_string(s[0]) + ", " + std::to_string(s[1]) + ", " +
               std::to_string(s[2]) + ") outside volume");
    }
  }

  Mask mask(ref);
  std::vector<Index3> queue;
  queue.reserve(seeds.size());
  double mean = 0.0;
  double n = 0.0;
  for (const auto& s : seeds) {
    if (mask.at(s)) continue;  // duplicate seed
    mask.set(s);
    queue.push_back(s);
    mean += vol.at(s);
    n += 1.0;
  }
  mean /= n;

  const auto offsets = neighbour_offsets(connectivity);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Index3 cur = queue[head];
    for (const auto& d : offsets) {
      const Index3 nb{cur[0] + d[0], cur[1] + d[1], cur[2] + d[2]};
      if (!ref.contains(nb) || mask.at(nb)) continue;
      const double v = vol.at(nb);
      if (std::abs(v - mean) <= threshold) {
        mask.set(nb);
        queue.push_back(nb);
        mean = (n * mean + v) / (n + 1.0);
        n += 1.0;
      }
    }
  }
  return mask;
}

namespace {

// Grid coordinates doubled so edge midpoints are integers.
struct Doubled {
  std::int64_t x, y, z;
};

Doubled operator+(Doubled a, Doubled b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Doubled operator-(Doubled a, Doubled b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

Doubled cross(Doubled a, Doubled b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
std::int64_t dot(Doubled a, Doubled b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

class SurfaceBuilder {
 public:
  explicit SurfaceBuilder(const SpatialReference& ref) : ref_(ref) {}

  // Midpoint of the grid edge between padded-grid vertices a and b
  // (coordinates doubled, so a + b is the doubled-doubled midpoint).
  std::uint32_t vertex(Doubled a, Doubled b) {
    const Doubled m = a + b;  // 2 * midpoint in grid units, offset by padding
    const std::uint64_t key = (static_cast<std::uint64_t>(m.x) << 42) |
                              (static_cast<std::uint64_t>(m.y) << 21) |
                              static_cast<std::uint64_t>(m.z);
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) {
      // Undo the +1 padding offset; grid unit == voxel index.
      mesh_.vertices.push_back(ref_.center_unchecked(m.x / 2.0 - 1.0, m.y / 2.0 - 1.0,
                                                     m.z / 2.0 - 1.0));
    }
    return it->second;
  }

  // Adds triangle (p, q, r) given doubled-doubled midpoints; flips it so its
  // normal has positive dot product with `outward`.
  void triangle(Doubled pa, Doubled pb, Doubled qa, Doubled qb, Doubled ra, Doubled rb,
                Doubled outward) {
    const Doubled p = pa + pb, q = qa + qb, r = ra + rb;
    const Doubled n = cross(q - p, r - p);
    auto vp = vertex(pa, pb), vq = vertex(qa, qb), vr = vertex(ra, rb);
    if (dot(n, outward) < 0) std::swap(vq, vr);
    mesh_.triangles.push_back({vp, vq, vr});
  }

  TriMesh take() { return std::move(mesh_); }

 private:
  const SpatialReference& ref_;
  TriMesh mesh_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

// Six tetrahedra sharing the 0-7 diagonal; corner bits are (dx, dy, dz).
constexpr int kTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
};

}  // namespace

TriMesh extract_isosurface(const Mask& mask) {
  if (mask.count() == 0) fail(ErrorCode::EmptyInput, "extract_isosurface: empty mask");
  const auto& n = mask.ref.image_size();
  // Padded grid: index g in [0, n + 1] maps to voxel g - 1.
  auto inside = [&](int gi, int gj, int gk) {
    const Index3 v{gi - 1, gj - 1, gk - 1};
    return mask.ref.contains(v) && mask.at(v);
  };

  SurfaceBuilder builder(mask.ref);
  for (int gk = 0; gk <= n[2]; ++gk) {
    for (int gj = 0; gj <= n[1]; ++gj) {
      for (int gi = 0; gi <= n[0]; ++gi) {
        bool val[8];
        Doubled pos[8];
        int set = 0;
        for (int b = 0; b < 8; ++b) {
          const int di = b & 1, dj = (b >> 1) & 1, dk = (b >> 2) & 1;
          val[b] = inside(gi + di, gj + dj, gk + dk);
          pos[b] = {gi + di, gj + dj, gk + dk};
          set += val[b];
        }
        if (set == 0 || set == 8) continue;

        for (const auto& tet : kTets) {
          int in[4], out[4], ni = 0, no = 0;
          for (int c : tet) (val[c] ? in[ni++] : out[no++]) = c;
          if (ni == 0 || no == 0) continue;
          if (ni == 1) {
            const Doubled p = pos[in[0]];
            const Doubled centroid = pos[out[0]] + pos[out[1]] + pos[out[2]];
            const Doubled dir = centroid - Doubled{3 * p.x, 3 * p.y, 3 * p.z};
            builder.triangle(p, pos[out[0]], p, pos[out[1]], p, pos[out[2]], dir);
          } else if (ni == 3) {
            const Doubled o = pos[out[0]];
            const Doubled centroid = pos[in[0]] + pos[in[1]] + pos[in[2]];
            const Doubled dir = Doubled{3 * o.x, 3 * o.y, 3 * o.z} - centroid;
            builder.triangle(o, pos[in[0]], o, pos[in[1]], o, pos[in[2]], dir);
          } else {
            const Doubled a = pos[in[0]], b = pos[in[1]];
            const Doubled c = pos[out[0]], d = pos[out[1]];
            const Doubled dir = (c + d) - (a + b);
            // Quad ac-ad-bd-bc split along ac-bd.
            builder.triangle(a, c, a, d, b, d, dir);
            builder.triangle(a, c, b, d, b, c, dir);
          }
        }
      }
    }
  }
  return builder.take();
}

PointCloud mask_to_point_cloud(const Mask& mask) {
  if (mask.count() == 0) fail(ErrorCode::EmptyInput, "mask_to_point_cloud: empty mask");
  const auto& n = mask.ref.image_size();
  static constexpr Index3 kOffsets[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                         {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  PointCloud cloud;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const Index3 v{i, j, k};
        if (!mask.at(v)) continue;
        bool boundary = false;
        for (const auto& d : kOffsets) {
          const Index3 nb{i + d[0], j + d[1], k + d[2]};
          if (!mask.ref.contains(nb) || !mask.at(nb)) {
            boundary = true;
            break;
          }
        }
        if (boundary) cloud.points.push_back(mask.ref.center_unchecked(i, j, k));
      }
    }
  }
  return cloud;
}

}  // namespace cardioreg
