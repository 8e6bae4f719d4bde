#pragma once

#include "msynth/common.hpp"
#include "msynth/geom/nearest.hpp"

#include <cstdint>

namespace msynth {

/// Fixed sample of points inside a ball, shared by every frame of a model's
/// input encoding. The basis is sampled once per model and serialized with it.
struct BpsBasis {
  Matrix3Xd points;    // 3 x n_bps, each column has norm <= radius
  double radius = 1.0; // meters
  std::uint64_t seed = 0;

  Eigen::Index size() const { return points.cols(); }
  void validate() const;
};

/// Per-frame object encoding: the vertex centroid plus, for every basis point
/// (translated to the centroid), the offset to its nearest mesh vertex.
struct BpsFeature {
  Vector3d centroid;
  Matrix3Xd deltas; // 3 x n_bps, delta_i = nearest_vertex(q_i) - q_i
};

/// Uniform rejection sampling in the ball of the given radius.
BpsBasis makeBpsBasis(Eigen::Index nBps, std::uint64_t seed, double radius = 1.0);

BpsFeature computeBps(const BpsBasis& basis, const Matrix3Xd& verts);

/// Flattens to [centroid; delta_0; delta_1; ...], length 3 + 3*n_bps.
VectorXd rawBpsVector(const BpsFeature& feature);

}  // namespace msynth
