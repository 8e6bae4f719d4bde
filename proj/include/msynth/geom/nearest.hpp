#pragma once

#include "msynth/common.hpp"

#include <vector>

namespace msynth {

struct NearestResult {
  Eigen::Index index = -1;
  double distance = 0.0;
};

/// O(K) scan; ties resolve to the lowest index.
NearestResult nearestVertexBrute(const Matrix3Xd& verts, const Vector3d& p);

/// Uniform-grid accelerator over a fixed vertex set. Queries return exactly
/// the brute-force result, including the lowest-index tie rule.
class VertexGrid {
 public:
  explicit VertexGrid(const Matrix3Xd& verts);

  NearestResult query(const Vector3d& p) const;

 private:
  Eigen::Index cellOf(const Vector3d& p) const;

  const Matrix3Xd& verts_;
  Vector3d origin_;
  Vector3d cellSize_;
  Eigen::Vector3i dims_;
  std::vector<std::vector<Eigen::Index>> cells_;
  double minCell_ = 0.0;
};

/// Brute force below this vertex count, grid-accelerated above.
inline constexpr Eigen::Index kNearestBruteThreshold = 4096;

NearestResult nearestVertex(const Matrix3Xd& verts, const Vector3d& p);

}  // namespace msynth
