#pragma once

#include "msynth/common.hpp"
#include "msynth/geom/mesh.hpp"

namespace msynth {

/// Dense signed-distance samples on a regular grid, x-fastest storage.
/// Queries outside the bounds clamp to the boundary and add the unsigned
/// distance from the query point to the clamped point.
struct SdfGrid {
  Eigen::Vector3i dims;  // nodes per axis, each >= 2
  Vector3d origin;       // position of node (0,0,0)
  Vector3d spacing;      // node-to-node step per axis, > 0
  VectorXd values;       // dims.x*dims.y*dims.z signed distances (meters)

  void validate() const;
  double query(const Vector3d& p) const; // trilinear interpolation
};

enum class SdfKind { Sphere, Box, Capsule, Grid };

/// Either an exact analytic primitive (centered/axis parameters below) or a
/// baked grid. Fields are in the object's local frame; callers transform
/// world-space queries into it.
struct SdfField {
  SdfKind kind = SdfKind::Sphere;
  double radius = 1.0;                     // sphere, capsule
  Vector3d halfExtents = Vector3d::Ones(); // box
  Vector3d capA = Vector3d::Zero();        // capsule segment endpoints
  Vector3d capB = Vector3d::Zero();
  SdfGrid grid;

  void validate() const;
};

SdfField makeSphereField(double radius);
SdfField makeBoxField(const Vector3d& halfExtents);
SdfField makeCapsuleField(const Vector3d& a, const Vector3d& b, double radius);

/// Negative inside, positive outside; analytic kinds are exact.
double sdfQuery(const SdfField& field, const Vector3d& p);

/// Exact distance from p to triangle (a, b, c).
double pointTriangleDistance(const Vector3d& p, const Vector3d& a, const Vector3d& b,
                             const Vector3d& c);

/// Generalized winding number of the mesh at p (1 inside a closed
/// outward-oriented mesh, 0 outside).
double windingNumber(const Mesh& mesh, const Vector3d& p);

/// Bakes a grid SDF over the mesh bounds expanded by `padding` on every side:
/// unsigned distances from exact point-triangle tests, sign from the
/// winding number (|w| > 0.5 means inside).
SdfField bakeSdfGrid(const Mesh& mesh, int resolution, double padding);

}  // namespace msynth
