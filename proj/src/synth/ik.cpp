#include "msynth/synth/ik.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace msynth {

TwoBoneSolution twoBoneIk(const Vector3d& shoulder, const Vector3d& target,
                          const Vector3d& restUpper, const Vector3d& restLower,
                          const Vector3d& bendHint) {
  const double l1 = restUpper.norm();
  const double l2 = restLower.norm();
  if (l1 <= 0.0 || l2 <= 0.0) throw ConfigError("twoBoneIk: degenerate bone lengths");

  TwoBoneSolution sol;
  const Vector3d delta = target - shoulder;
  const double d = delta.norm();
  const double slack = 1e-12;
  if (d < slack || d > l1 + l2 + slack || d < std::abs(l1 - l2) - slack) return sol;

  const Vector3d dir = delta / d;
  Vector3d bend = bendHint - bendHint.dot(dir) * dir;
  if (bend.squaredNorm() < 1e-16) {
    bend = Vector3d::UnitZ() - dir.z() * dir;
    if (bend.squaredNorm() < 1e-16) bend = Vector3d::UnitX() - dir.x() * dir;
  }
  bend.normalize();

  const double cosA = std::clamp((l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0);
  const double sinA = std::sqrt(std::max(0.0, 1.0 - cosA * cosA));
  sol.elbow = shoulder + l1 * (cosA * dir + sinA * bend);
  sol.upper = Eigen::Quaterniond::FromTwoVectors(restUpper, sol.elbow - shoulder).toRotationMatrix();
  sol.lower = Eigen::Quaterniond::FromTwoVectors(restLower, target - sol.elbow).toRotationMatrix();
  sol.reachable = true;
  return sol;
}

}  // namespace msynth
