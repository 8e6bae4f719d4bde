#include "msynth/kin/skeleton.hpp"

#include <algorithm>

namespace msynth {

void Skeleton::validate() const {
  const int j = jointCount();
  if (j < 1) throw ConfigError("Skeleton: needs at least one joint");
  if (parents[0] != -1) throw ConfigError("Skeleton: joint 0 must be the root");
  for (int i = 1; i < j; ++i) {
    if (parents[i] < 0 || parents[i] >= i) {
      throw ConfigError("Skeleton: parents must be topologically sorted with one root");
    }
  }
  if (static_cast<int>(jointNames.size()) != j) {
    throw ConfigError("Skeleton: joint name count mismatch");
  }
  if (offsets.cols() != j || !offsets.allFinite()) {
    throw ConfigError("Skeleton: bad offset table");
  }
  if (rotatedJoints.empty()) throw ConfigError("Skeleton: needs at least one rotated joint");
  for (std::size_t k = 0; k < rotatedJoints.size(); ++k) {
    const int idx = rotatedJoints[k];
    if (idx < 0 || idx >= j) throw ConfigError("Skeleton: rotated joint out of range");
    if (k > 0 && rotatedJoints[k - 1] >= idx) {
      throw ConfigError("Skeleton: rotated joints must be strictly ascending");
    }
  }
  if (leftWrist < 0 || leftWrist >= j || rightWrist < 0 || rightWrist >= j ||
      leftWrist == rightWrist) {
    throw ConfigError("Skeleton: wrist indices invalid");
  }
  for (const int f : footJoints) {
    if (f < 0 || f >= j) throw ConfigError("Skeleton: foot index out of range");
  }
  if (capsuleRadii.size() != j) throw ConfigError("Skeleton: capsule radius count mismatch");
  for (int i = 1; i < j; ++i) {
    if (!(capsuleRadii(i) > 0.0)) throw ConfigError("Skeleton: capsule radii must be positive");
  }
  if (proxyRings < 1 || proxySegments < 3) {
    throw ConfigError("Skeleton: proxy sampling needs >= 1 ring and >= 3 segments");
  }
}

PoseFrame PoseFrame::rest(const Skeleton& skel) {
  PoseFrame frame;
  frame.rotations.resize(6, skel.rotatedCount());
  for (int k = 0; k < skel.rotatedCount(); ++k) {
    frame.rotations.col(k) = identityRotation6d();
  }
  return frame;
}

FkResult forwardKinematics(const Skeleton& skel, const PoseFrame& frame) {
  const int j = skel.jointCount();
  if (frame.rotations.cols() != skel.rotatedCount()) {
    throw std::invalid_argument("forwardKinematics: rotation count mismatch");
  }
  FkResult out;
  out.positions.resize(3, j);
  out.rotations.assign(static_cast<std::size_t>(j), Matrix3d::Identity());

  std::vector<Matrix3d> locals(static_cast<std::size_t>(j), Matrix3d::Identity());
  for (int k = 0; k < skel.rotatedCount(); ++k) {
    locals[static_cast<std::size_t>(skel.rotatedJoints[k])] =
        sixdToMatrix<double>(frame.rotations.col(k));
  }

  out.positions.col(0) = frame.root;
  out.rotations[0] = locals[0];
  for (int i = 1; i < j; ++i) {
    const int p = skel.parents[i];
    out.positions.col(i) = out.positions.col(p) + out.rotations[p] * skel.offsets.col(i);
    out.rotations[i] = out.rotations[p] * locals[i];
  }
  return out;
}

namespace {

Skeleton buildSkeleton(std::vector<std::string> names, std::vector<int> parents,
                       std::vector<Vector3d> offsets, std::vector<int> rotated, int leftWrist,
                       int rightWrist, std::vector<int> feet, double radius) {
  Skeleton s;
  s.jointNames = std::move(names);
  s.parents = std::move(parents);
  s.offsets.resize(3, static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t i = 0; i < offsets.size(); ++i) s.offsets.col(i) = offsets[i];
  s.rotatedJoints = std::move(rotated);
  s.leftWrist = leftWrist;
  s.rightWrist = rightWrist;
  s.footJoints = std::move(feet);
  s.capsuleRadii = VectorXd::Constant(s.jointCount(), radius);
  s.validate();
  return s;
}

}  // namespace

Skeleton humanoid24() {
  std::vector<std::string> names = {
      "pelvis",     "l_hip",      "r_hip",      "spine1",  "l_knee",     "r_knee",
      "spine2",     "l_ankle",    "r_ankle",    "spine3",  "l_foot",     "r_foot",
      "neck",       "l_collar",   "r_collar",   "head",    "l_shoulder", "r_shoulder",
      "l_elbow",    "r_elbow",    "l_wrist",    "r_wrist", "l_hand",     "r_hand"};
  std::vector<int> parents = {-1, 0, 0,  0, 1,  2,  3,  4,  5,  6,  7,  8,
                              9,  9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};
  std::vector<Vector3d> offsets = {
      {0, 0, 0},        {0, 0.10, -0.05}, {0, -0.10, -0.05}, {0, 0, 0.12},
      {0, 0, -0.40},    {0, 0, -0.40},    {0, 0, 0.14},      {0, 0, -0.42},
      {0, 0, -0.42},    {0, 0, 0.14},     {0.14, 0, -0.06},  {0.14, 0, -0.06},
      {0, 0, 0.10},     {0, 0.08, 0.05},  {0, -0.08, 0.05},  {0, 0, 0.12},
      {0, 0.12, 0},     {0, -0.12, 0},    {0, 0.28, 0},      {0, -0.28, 0},
      {0, 0.25, 0},     {0, -0.25, 0},    {0, 0.08, 0},      {0, -0.08, 0}};
  std::vector<int> rotated(22);
  for (int i = 0; i < 22; ++i) rotated[static_cast<std::size_t>(i)] = i;
  return buildSkeleton(std::move(names), std::move(parents), std::move(offsets),
                       std::move(rotated), 20, 21, {7, 8, 10, 11}, 0.05);
}

Skeleton stickFigure9() {
  std::vector<std::string> names = {"root",    "spine",   "head",    "l_shoulder", "l_elbow",
                                    "l_wrist", "r_shoulder", "r_elbow", "r_wrist"};
  std::vector<int> parents = {-1, 0, 1, 1, 3, 4, 1, 6, 7};
  std::vector<Vector3d> offsets = {{0, 0, 0},       {0, 0, 0.25},     {0, 0, 0.30},
                                   {0, 0.20, 0.20}, {0, 0.30, 0},     {0, 0.26, 0},
                                   {0, -0.20, 0.20}, {0, -0.30, 0},   {0, -0.26, 0}};
  return buildSkeleton(std::move(names), std::move(parents), std::move(offsets), {3, 4, 6, 7}, 5,
                       8, {}, 0.05);
}

}  // namespace msynth
