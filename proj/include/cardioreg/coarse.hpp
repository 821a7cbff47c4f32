#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cardioreg/core.hpp"

namespace cardioreg {

/// Interventricular groove annotations. Each group is stored in annotation
/// order, traversed base toward apex in both modalities, so that index i in
/// one modality corresponds to index i in the other.
struct LandmarkSet {
  std::vector<Point3> anterior;
  std::vector<Point3> posterior;
};

struct CoarseParams {
  bool with_scaling = true;
  /// Per-group sample count; when unset each group uses the smaller of the
  /// two modalities' counts.
  std::optional<std::size_t> target_count;
};

/// Uniform index subsampling: keeps indices round(k (n-1) / (m-1)).
std::vector<Point3> downsample_group(std::span<const Point3> group, std::size_t m);
LandmarkSet downsample_landmarks(const LandmarkSet& set, std::size_t m);

/// Least-squares similarity (or rigid) transform mapping src onto dst
/// (Umeyama 1991).
AffineTransform3 estimate_umeyama(std::span<const Point3> src,
                                  std::span<const Point3> dst,
                                  bool with_scaling);

AffineTransform3 coarse_register(const LandmarkSet& moving,
                                 const LandmarkSet& fixed,
                                 const CoarseParams& params = {});

}  // namespace cardioreg
