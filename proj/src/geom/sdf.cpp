#include "msynth/geom/sdf.hpp"

#include "msynth/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace msynth {

void SdfGrid::validate() const {
  if ((dims.array() < 2).any()) throw ConfigError("SdfGrid: needs >= 2 nodes per axis");
  if ((spacing.array() <= 0.0).any()) throw ConfigError("SdfGrid: spacing must be positive");
  const Eigen::Index expected =
      static_cast<Eigen::Index>(dims.x()) * dims.y() * dims.z();
  if (values.size() != expected) throw ConfigError("SdfGrid: value count mismatch");
  if (!values.allFinite()) throw ConfigError("SdfGrid: non-finite value");
}

double SdfGrid::query(const Vector3d& p) const {
  const Vector3d upper = origin + spacing.cwiseProduct((dims.array() - 1).cast<double>().matrix());
  const Vector3d clamped = p.cwiseMax(origin).cwiseMin(upper);

  Eigen::Vector3i i0;
  Vector3d frac;
  for (int a = 0; a < 3; ++a) {
    const double u = (clamped(a) - origin(a)) / spacing(a);
    i0(a) = std::min(static_cast<int>(u), dims(a) - 2);
    frac(a) = u - i0(a);
  }
  const auto at = [&](int dx, int dy, int dz) {
    return values((static_cast<Eigen::Index>(i0.z() + dz) * dims.y() + (i0.y() + dy)) * dims.x() +
                  (i0.x() + dx));
  };
  const double c00 = at(0, 0, 0) * (1 - frac.x()) + at(1, 0, 0) * frac.x();
  const double c10 = at(0, 1, 0) * (1 - frac.x()) + at(1, 1, 0) * frac.x();
  const double c01 = at(0, 0, 1) * (1 - frac.x()) + at(1, 0, 1) * frac.x();
  const double c11 = at(0, 1, 1) * (1 - frac.x()) + at(1, 1, 1) * frac.x();
  const double c0 = c00 * (1 - frac.y()) + c10 * frac.y();
  const double c1 = c01 * (1 - frac.y()) + c11 * frac.y();
  const double inside = c0 * (1 - frac.z()) + c1 * frac.z();

  // Outside the sampled bounds: clamp and add the unsigned distance back.
  return inside + (p - clamped).norm();
}

void SdfField::validate() const {
  switch (kind) {
    case SdfKind::Sphere:
      if (radius <= 0.0) throw ConfigError("SdfField: sphere radius must be positive");
      break;
    case SdfKind::Box:
      if ((halfExtents.array() <= 0.0).any()) {
        throw ConfigError("SdfField: box half-extents must be positive");
      }
      break;
    case SdfKind::Capsule:
      if (radius <= 0.0) throw ConfigError("SdfField: capsule radius must be positive");
      break;
    case SdfKind::Grid:
      grid.validate();
      break;
  }
}

SdfField makeSphereField(double radius) {
  SdfField f;
  f.kind = SdfKind::Sphere;
  f.radius = radius;
  f.validate();
  return f;
}

SdfField makeBoxField(const Vector3d& halfExtents) {
  SdfField f;
  f.kind = SdfKind::Box;
  f.halfExtents = halfExtents;
  f.validate();
  return f;
}

SdfField makeCapsuleField(const Vector3d& a, const Vector3d& b, double radius) {
  SdfField f;
  f.kind = SdfKind::Capsule;
  f.capA = a;
  f.capB = b;
  f.radius = radius;
  f.validate();
  return f;
}

static double segmentDistance(const Vector3d& p, const Vector3d& a, const Vector3d& b) {
  const Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double sdfQuery(const SdfField& field, const Vector3d& p) {
  switch (field.kind) {
    case SdfKind::Sphere:
      return p.norm() - field.radius;
    case SdfKind::Box: {
      const Vector3d q = p.cwiseAbs() - field.halfExtents;
      const double outside = q.cwiseMax(0.0).norm();
      const double inside = std::min(q.maxCoeff(), 0.0);
      return outside + inside;
    }
    case SdfKind::Capsule:
      return segmentDistance(p, field.capA, field.capB) - field.radius;
    case SdfKind::Grid:
      return field.grid.query(p);
  }
  throw ConfigError("sdfQuery: unknown field kind");
}

double pointTriangleDistance(const Vector3d& p, const Vector3d& a, const Vector3d& b,
                             const Vector3d& c) {
  // Closest point on triangle via barycentric region tests.
  const Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();

  const Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }

  const Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + v * ab + w * ac)).norm();
}

double windingNumber(const Mesh& mesh, const Vector3d& p) {
  // Sum of signed solid angles of each triangle as seen from p.
  double total = 0.0;
  for (Eigen::Index f = 0; f < mesh.faceCount(); ++f) {
    const Vector3d a = mesh.vertices.col(mesh.faces(0, f)) - p;
    const Vector3d b = mesh.vertices.col(mesh.faces(1, f)) - p;
    const Vector3d c = mesh.vertices.col(mesh.faces(2, f)) - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double det = a.dot(b.cross(c));
    const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(det, denom);
  }
  return total / (4.0 * std::numbers::pi);
}

SdfField bakeSdfGrid(const Mesh& mesh, int resolution, double padding) {
  mesh.validate();
  if (mesh.faceCount() < 1) throw ConfigError("bakeSdfGrid: mesh has no faces");
  if (resolution < 2) throw ConfigError("bakeSdfGrid: resolution must be >= 2");
  if (padding < 0.0) throw ConfigError("bakeSdfGrid: padding must be >= 0");

  SdfField field;
  field.kind = SdfKind::Grid;
  SdfGrid& grid = field.grid;
  grid.dims.setConstant(resolution);
  Vector3d lo, hi;
  mesh.bounds(lo, hi);
  grid.origin = lo.array() - padding;
  const Vector3d extent = (hi - lo).array() + 2.0 * padding;
  grid.spacing = extent / static_cast<double>(resolution - 1);
  grid.values.resize(static_cast<Eigen::Index>(resolution) * resolution * resolution);

  const Eigen::Index nodes = grid.values.size();
  parallelFor(static_cast<std::size_t>(nodes), [&](std::size_t n) {
    const auto idx = static_cast<Eigen::Index>(n);
    const int x = static_cast<int>(idx % resolution);
    const int y = static_cast<int>((idx / resolution) % resolution);
    const int z = static_cast<int>(idx / (static_cast<Eigen::Index>(resolution) * resolution));
    const Vector3d p =
        grid.origin + grid.spacing.cwiseProduct(Vector3d(x, y, z));
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index f = 0; f < mesh.faceCount(); ++f) {
      best = std::min(best, pointTriangleDistance(p, mesh.vertices.col(mesh.faces(0, f)),
                                                  mesh.vertices.col(mesh.faces(1, f)),
                                                  mesh.vertices.col(mesh.faces(2, f))));
    }
    const bool inside = std::abs(windingNumber(mesh, p)) > 0.5;
    grid.values(idx) = inside ? -best : best;
  });
  grid.validate();
  return field;
}

}  // namespace msynth
