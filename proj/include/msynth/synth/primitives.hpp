#pragma once

#include "msynth/geom/mesh.hpp"

namespace msynth {

/// Closed primitive mesh plus two annotated grasp vertices. Grasp vertices
/// are real mesh vertices sitting exactly on the surface (standalone, not
/// referenced by faces), so a wrist placed on one has distance zero to the
/// mesh. The left grasp faces +y (the left arm side), the right faces -y.
/// All primitives rest on z = 0 with their base center at the origin.
struct GraspableMesh {
  Mesh mesh;
  Eigen::Index leftGrasp = -1;
  Eigen::Index rightGrasp = -1;
};

/// Axis-aligned box, footprint sx x sy, height sz; grasps at side-face centers.
GraspableMesh makeBox(double sx, double sy, double sz);

/// Upright cylinder; grasps on the wall at half height.
GraspableMesh makeCylinder(double radius, double height, int segments = 16);

/// Desk-lamp-like compound: base disk, thin pole, box head; grasps on the pole.
GraspableMesh makeLamp(double baseRadius, double poleHeight, double headSize);

/// Appends `extra` to `mesh`, shifting face indices.
void appendMesh(Mesh& mesh, const Mesh& extra);

}  // namespace msynth
