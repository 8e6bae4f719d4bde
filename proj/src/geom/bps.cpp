#include "msynth/geom/bps.hpp"

#include "msynth/rng.hpp"

#include <stdexcept>

namespace msynth {

void BpsBasis::validate() const {
  if (points.cols() < 1) throw ConfigError("BpsBasis: needs at least one point");
  if (radius <= 0.0) throw ConfigError("BpsBasis: radius must be positive");
  if (!points.allFinite()) throw ConfigError("BpsBasis: non-finite point");
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (points.col(i).norm() > radius * (1.0 + 1e-12)) {
      throw ConfigError("BpsBasis: point outside the ball");
    }
  }
}

BpsBasis makeBpsBasis(Eigen::Index nBps, std::uint64_t seed, double radius) {
  if (nBps < 1) throw ConfigError("makeBpsBasis: n_bps must be >= 1");
  if (radius <= 0.0) throw ConfigError("makeBpsBasis: radius must be positive");
  BpsBasis basis;
  basis.points.resize(3, nBps);
  basis.radius = radius;
  basis.seed = seed;
  Rng rng = makeRng(seed);
  for (Eigen::Index i = 0; i < nBps; ++i) {
    Vector3d p;
    do {
      p.x() = uniformRange(rng, -1.0, 1.0);
      p.y() = uniformRange(rng, -1.0, 1.0);
      p.z() = uniformRange(rng, -1.0, 1.0);
    } while (p.squaredNorm() > 1.0);
    basis.points.col(i) = p * radius;
  }
  return basis;
}

BpsFeature computeBps(const BpsBasis& basis, const Matrix3Xd& verts) {
  if (verts.cols() < 1) throw std::invalid_argument("computeBps: empty vertex list");
  BpsFeature feature;
  feature.centroid = verts.rowwise().mean();
  feature.deltas.resize(3, basis.size());
  if (verts.cols() < kNearestBruteThreshold) {
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
      const Vector3d q = feature.centroid + basis.points.col(i);
      feature.deltas.col(i) = verts.col(nearestVertexBrute(verts, q).index) - q;
    }
  } else {
    const VertexGrid grid(verts);
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
      const Vector3d q = feature.centroid + basis.points.col(i);
      feature.deltas.col(i) = verts.col(grid.query(q).index) - q;
    }
  }
  return feature;
}

VectorXd rawBpsVector(const BpsFeature& feature) {
  VectorXd raw(3 + 3 * feature.deltas.cols());
  raw.head<3>() = feature.centroid;
  raw.tail(3 * feature.deltas.cols()) =
      Eigen::Map<const VectorXd>(feature.deltas.data(), 3 * feature.deltas.cols());
  return raw;
}

}  // namespace msynth
