#include "msynth/geom/nearest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace msynth {

NearestResult nearestVertexBrute(const Matrix3Xd& verts, const Vector3d& p) {
  if (verts.cols() == 0) {
    throw std::invalid_argument("nearestVertex: empty vertex set");
  }
  Eigen::Index best = 0;
  double bestSq = (verts.col(0) - p).squaredNorm();
  for (Eigen::Index i = 1; i < verts.cols(); ++i) {
    const double d = (verts.col(i) - p).squaredNorm();
    if (d < bestSq) {
      bestSq = d;
      best = i;
    }
  }
  return {best, std::sqrt(bestSq)};
}

VertexGrid::VertexGrid(const Matrix3Xd& verts) : verts_(verts) {
  if (verts.cols() == 0) {
    throw std::invalid_argument("VertexGrid: empty vertex set");
  }
  const Vector3d lo = verts.rowwise().minCoeff();
  const Vector3d hi = verts.rowwise().maxCoeff();
  const Vector3d extent = (hi - lo).cwiseMax(1e-9);

  // Aim for roughly one vertex per cell, capped to keep memory bounded.
  const double targetCells = static_cast<double>(verts.cols());
  const double h = std::cbrt(extent.prod() / std::max(targetCells, 1.0));
  for (int a = 0; a < 3; ++a) {
    dims_(a) = std::clamp(static_cast<int>(std::ceil(extent(a) / std::max(h, 1e-12))), 1, 128);
    cellSize_(a) = extent(a) / dims_(a);
  }
  origin_ = lo;
  minCell_ = cellSize_.minCoeff();

  cells_.assign(static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z(), {});
  for (Eigen::Index i = 0; i < verts.cols(); ++i) {
    cells_[static_cast<std::size_t>(cellOf(verts.col(i)))].push_back(i);
  }
}

Eigen::Index VertexGrid::cellOf(const Vector3d& p) const {
  Eigen::Vector3i c;
  for (int a = 0; a < 3; ++a) {
    c(a) = std::clamp(static_cast<int>((p(a) - origin_(a)) / cellSize_(a)), 0, dims_(a) - 1);
  }
  return (static_cast<Eigen::Index>(c.z()) * dims_.y() + c.y()) * dims_.x() + c.x();
}

NearestResult VertexGrid::query(const Vector3d& p) const {
  Eigen::Vector3i center;
  for (int a = 0; a < 3; ++a) {
    center(a) = std::clamp(static_cast<int>((p(a) - origin_(a)) / cellSize_(a)), 0, dims_(a) - 1);
  }

  Eigen::Index bestIdx = -1;
  double bestSq = std::numeric_limits<double>::infinity();
  const auto scanCell = [&](int x, int y, int z) {
    const std::size_t cell =
        static_cast<std::size_t>((static_cast<Eigen::Index>(z) * dims_.y() + y) * dims_.x() + x);
    for (const Eigen::Index i : cells_[cell]) {
      const double d = (verts_.col(i) - p).squaredNorm();
      if (d < bestSq || (d == bestSq && i < bestIdx)) {
        bestSq = d;
        bestIdx = i;
      }
    }
  };

  const int maxRing = dims_.maxCoeff();
  for (int ring = 0; ring <= maxRing; ++ring) {
    // Cells at Chebyshev ring r are at least (r-1)*minCell away from p.
    if (bestIdx >= 0) {
      const double lower = (ring - 1) * minCell_;
      if (lower > 0.0 && lower * lower > bestSq) break;
    }
    const int x0 = center.x() - ring, x1 = center.x() + ring;
    const int y0 = center.y() - ring, y1 = center.y() + ring;
    const int z0 = center.z() - ring, z1 = center.z() + ring;
    for (int z = std::max(z0, 0); z <= std::min(z1, dims_.z() - 1); ++z) {
      for (int y = std::max(y0, 0); y <= std::min(y1, dims_.y() - 1); ++y) {
        for (int x = std::max(x0, 0); x <= std::min(x1, dims_.x() - 1); ++x) {
          const bool onShell = x == x0 || x == x1 || y == y0 || y == y1 || z == z0 || z == z1;
          if (onShell) scanCell(x, y, z);
        }
      }
    }
  }
  return {bestIdx, std::sqrt(bestSq)};
}

NearestResult nearestVertex(const Matrix3Xd& verts, const Vector3d& p) {
  if (verts.cols() < kNearestBruteThreshold) {
    return nearestVertexBrute(verts, p);
  }
  return VertexGrid(verts).query(p);
}

}  // namespace msynth
