#pragma once

#include "msynth/geom/mesh.hpp"
#include "msynth/math/rigid_transform.hpp"

#include <filesystem>
#include <vector>

namespace msynth {

/// Rigid object geometry plus its per-frame pose. Transforms are strictly
/// rigid (scale 1); frame t vertices are rotation * rest + translation.
struct ObjectSequence {
  Mesh mesh;
  std::vector<RigidTransform> transforms;
  double fps = 30.0;

  Eigen::Index frames() const { return static_cast<Eigen::Index>(transforms.size()); }

  Matrix3Xd verticesAt(Eigen::Index t) const;
  Vector3d vertexAt(Eigen::Index t, Eigen::Index vertex) const;

  void validate() const;
};

/// Trajectory text format, one frame per record:
///   msynth-trajectory v1
///   fps <value>
///   frames <count>
///   <index> <9 rotation entries, row-major> <tx> <ty> <tz>
struct Trajectory {
  std::vector<RigidTransform> transforms;
  double fps = 30.0;
};

Trajectory loadTrajectory(const std::filesystem::path& path);
void saveTrajectory(const Trajectory& trajectory, const std::filesystem::path& path);

}  // namespace msynth
