#include "msynth/synth/primitives.hpp"

#include <cmath>
#include <numbers>

namespace msynth {

void appendMesh(Mesh& mesh, const Mesh& extra) {
  const Eigen::Index v0 = mesh.vertices.cols();
  const Eigen::Index f0 = mesh.faces.cols();
  mesh.vertices.conservativeResize(3, v0 + extra.vertices.cols());
  mesh.vertices.rightCols(extra.vertices.cols()) = extra.vertices;
  mesh.faces.conservativeResize(3, f0 + extra.faces.cols());
  mesh.faces.rightCols(extra.faces.cols()) = extra.faces.array() + static_cast<int>(v0);
}

namespace {

// Boxes carry their own grasp points; helper builds just the closed shell.
Mesh boxShell(double sx, double sy, double sz, double cx, double cy, double z0) {
  if (sx <= 0.0 || sy <= 0.0 || sz <= 0.0) throw ConfigError("boxShell: dimensions must be positive");
  Mesh m;
  const double hx = 0.5 * sx;
  const double hy = 0.5 * sy;
  m.vertices.resize(3, 8);
  m.vertices.col(0) = Vector3d(cx - hx, cy - hy, z0);
  m.vertices.col(1) = Vector3d(cx + hx, cy - hy, z0);
  m.vertices.col(2) = Vector3d(cx + hx, cy + hy, z0);
  m.vertices.col(3) = Vector3d(cx - hx, cy + hy, z0);
  m.vertices.col(4) = Vector3d(cx - hx, cy - hy, z0 + sz);
  m.vertices.col(5) = Vector3d(cx + hx, cy - hy, z0 + sz);
  m.vertices.col(6) = Vector3d(cx + hx, cy + hy, z0 + sz);
  m.vertices.col(7) = Vector3d(cx - hx, cy + hy, z0 + sz);
  m.faces.resize(3, 12);
  int f = 0;
  auto quad = [&](int a, int b, int c, int d) {
    m.faces.col(f++) = Eigen::Vector3i(a, b, c);
    m.faces.col(f++) = Eigen::Vector3i(a, c, d);
  };
  quad(0, 3, 2, 1);  // bottom, normal -z
  quad(4, 5, 6, 7);  // top, +z
  quad(0, 1, 5, 4);  // -y side
  quad(2, 3, 7, 6);  // +y side
  quad(1, 2, 6, 5);  // +x side
  quad(3, 0, 4, 7);  // -x side
  return m;
}

Mesh cylinderShell(double radius, double height, int segments, double z0) {
  if (radius <= 0.0 || height <= 0.0) throw ConfigError("cylinderShell: dimensions must be positive");
  if (segments < 3) throw ConfigError("cylinderShell: need at least 3 segments");
  Mesh m;
  const int n = segments;
  m.vertices.resize(3, 2 * n + 2);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    const double x = radius * std::cos(a);
    const double y = radius * std::sin(a);
    m.vertices.col(i) = Vector3d(x, y, z0);
    m.vertices.col(n + i) = Vector3d(x, y, z0 + height);
  }
  const int cb = 2 * n;      // bottom cap center
  const int ct = 2 * n + 1;  // top cap center
  m.vertices.col(cb) = Vector3d(0, 0, z0);
  m.vertices.col(ct) = Vector3d(0, 0, z0 + height);
  m.faces.resize(3, 4 * n);
  int f = 0;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    m.faces.col(f++) = Eigen::Vector3i(i, j, n + j);       // wall
    m.faces.col(f++) = Eigen::Vector3i(i, n + j, n + i);   // wall
    m.faces.col(f++) = Eigen::Vector3i(cb, j, i);          // bottom, -z
    m.faces.col(f++) = Eigen::Vector3i(ct, n + i, n + j);  // top, +z
  }
  return m;
}

Eigen::Index pushGrasp(Mesh& mesh, const Vector3d& p) {
  const Eigen::Index idx = mesh.vertices.cols();
  mesh.vertices.conservativeResize(3, idx + 1);
  mesh.vertices.col(idx) = p;
  return idx;
}

}  // namespace

GraspableMesh makeBox(double sx, double sy, double sz) {
  GraspableMesh g;
  g.mesh = boxShell(sx, sy, sz, 0.0, 0.0, 0.0);
  g.mesh.name = "box";
  g.leftGrasp = pushGrasp(g.mesh, Vector3d(0.0, 0.5 * sy, 0.5 * sz));
  g.rightGrasp = pushGrasp(g.mesh, Vector3d(0.0, -0.5 * sy, 0.5 * sz));
  g.mesh.validate();
  return g;
}

GraspableMesh makeCylinder(double radius, double height, int segments) {
  GraspableMesh g;
  g.mesh = cylinderShell(radius, height, segments, 0.0);
  g.mesh.name = "cylinder";
  g.leftGrasp = pushGrasp(g.mesh, Vector3d(0.0, radius, 0.5 * height));
  g.rightGrasp = pushGrasp(g.mesh, Vector3d(0.0, -radius, 0.5 * height));
  g.mesh.validate();
  return g;
}

GraspableMesh makeLamp(double baseRadius, double poleHeight, double headSize) {
  if (baseRadius <= 0.0 || poleHeight <= 0.0 || headSize <= 0.0)
    throw ConfigError("makeLamp: dimensions must be positive");
  const double baseHeight = 0.04;
  const double poleRadius = 0.015;
  GraspableMesh g;
  g.mesh = cylinderShell(baseRadius, baseHeight, 16, 0.0);
  appendMesh(g.mesh, cylinderShell(poleRadius, poleHeight, 10, baseHeight));
  appendMesh(g.mesh, boxShell(headSize, headSize, 0.6 * headSize, 0.0, 0.0, baseHeight + poleHeight));
  g.mesh.name = "lamp";
  const double graspZ = baseHeight + 0.6 * poleHeight;
  g.leftGrasp = pushGrasp(g.mesh, Vector3d(0.0, poleRadius, graspZ));
  g.rightGrasp = pushGrasp(g.mesh, Vector3d(0.0, -poleRadius, graspZ));
  g.mesh.validate();
  return g;
}

}  // namespace msynth
