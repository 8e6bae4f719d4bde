#pragma once

#include "msynth/common.hpp"

#include <filesystem>
#include <string>

namespace msynth {

/// Triangle mesh with vertices in meters. Faces may be empty for point-cloud
/// style use; signed-distance baking requires a closed triangulation.
struct Mesh {
  Matrix3Xd vertices;  // 3 x K
  Matrix3Xi faces;     // 3 x F, zero-based
  std::string name;

  Eigen::Index vertexCount() const { return vertices.cols(); }
  Eigen::Index faceCount() const { return faces.cols(); }

  Vector3d centroid() const;
  void bounds(Vector3d& lo, Vector3d& hi) const;

  /// Throws std::invalid_argument on empty vertices, NaN coordinates, or
  /// out-of-range face indices.
  void validate() const;
};

/// OBJ subset reader: `v x y z` and triangle `f` lines with 1-based indices
/// (tokens like `f 1/2/3 ...` keep only the vertex index). Other keywords are
/// skipped. Throws IoError on unreadable files and malformed records.
Mesh loadObj(const std::filesystem::path& path);

void saveObj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace msynth
