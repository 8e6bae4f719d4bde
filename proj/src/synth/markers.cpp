#include "msynth/synth/markers.hpp"

#include "msynth/math/procrustes.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace msynth {

MarkerFit solveObjectPoseFromMarkers(const Matrix3Xd& restMarkers,
                                     const std::vector<Matrix3Xd>& observed, double fps) {
  const Eigen::Index m = restMarkers.cols();
  if (m < 3) throw ConfigError("solveObjectPoseFromMarkers: need at least 3 markers");
  if (!restMarkers.allFinite()) throw ConfigError("solveObjectPoseFromMarkers: non-finite marker");
  if (!(fps > 0.0)) throw ConfigError("solveObjectPoseFromMarkers: fps must be positive");

  const Matrix3Xd centered = restMarkers.colwise() - restMarkers.rowwise().mean();
  const Eigen::JacobiSVD<Matrix3Xd> svd(centered);
  if (svd.singularValues()(1) <= 1e-12 * std::max(1.0, svd.singularValues()(0))) {
    throw ConfigError("solveObjectPoseFromMarkers: markers are collinear");
  }

  std::vector<Vector3d> rest(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) rest[static_cast<std::size_t>(i)] = restMarkers.col(i);

  MarkerFit fit;
  fit.trajectory.fps = fps;
  fit.trajectory.transforms.reserve(observed.size());
  fit.scales.resize(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t t = 0; t < observed.size(); ++t) {
    const Matrix3Xd& obs = observed[t];
    if (obs.cols() != m) throw ConfigError("solveObjectPoseFromMarkers: marker count changed");
    if (!obs.allFinite()) throw ConfigError("solveObjectPoseFromMarkers: non-finite observation");
    std::vector<Vector3d> target(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) target[static_cast<std::size_t>(i)] = obs.col(i);
    const RigidTransform tf = solveProcrustes(rest, target);
    fit.scales(static_cast<Eigen::Index>(t)) = tf.scale;
    if (std::abs(tf.scale - 1.0) > 0.01) fit.scaleWarning = true;
    fit.trajectory.transforms.push_back(tf);
  }
  return fit;
}

}  // namespace msynth
