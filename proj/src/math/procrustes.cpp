#include "msynth/math/procrustes.hpp"

#include <Eigen/SVD>

namespace msynth {

RigidTransform solveProcrustes(const std::vector<Vector3d>& source,
                               const std::vector<Vector3d>& target) {
  const std::size_t n = source.size();
  if (n != target.size()) {
    throw std::invalid_argument("solveProcrustes: point counts differ");
  }
  if (n < 3) {
    throw std::invalid_argument("solveProcrustes: need at least 3 point pairs");
  }

  Vector3d srcMean = Vector3d::Zero();
  Vector3d tgtMean = Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    srcMean += source[i];
    tgtMean += target[i];
  }
  srcMean /= static_cast<double>(n);
  tgtMean /= static_cast<double>(n);

  Matrix3d cov = Matrix3d::Zero();
  double srcVar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3d s = source[i] - srcMean;
    const Vector3d t = target[i] - tgtMean;
    cov += t * s.transpose();
    srcVar += s.squaredNorm();
  }
  cov /= static_cast<double>(n);
  srcVar /= static_cast<double>(n);

  Eigen::JacobiSVD<Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector3d sigma = svd.singularValues();

  // Collinear sources give a rank-1 covariance; the rotation about the line
  // would be unconstrained.
  if (!(sigma(1) > 1e-12 * std::max(sigma(0), 1e-300)) || !(srcVar > 0.0)) {
    throw std::invalid_argument("solveProcrustes: points are collinear or coincident");
  }

  Vector3d signs = Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    signs(2) = -1.0;
  }

  RigidTransform out;
  out.rotation = svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
  out.scale = sigma.dot(signs) / srcVar;
  out.translation = tgtMean - out.scale * (out.rotation * srcMean);
  return out;
}

double alignmentRmse(const std::vector<Vector3d>& source,
                     const std::vector<Vector3d>& target,
                     const RigidTransform& transform) {
  if (source.size() != target.size() || source.empty()) {
    throw std::invalid_argument("alignmentRmse: point counts differ or empty");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    sum += (transform.apply(source[i]) - target[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(source.size()));
}

}  // namespace msynth
