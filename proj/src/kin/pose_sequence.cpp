#include "msynth/kin/pose_sequence.hpp"

namespace msynth {

VectorXd rowFromFrame(const Skeleton& skel, const PoseFrame& frame) {
  if (frame.rotations.cols() != skel.rotatedCount()) {
    throw std::invalid_argument("rowFromFrame: rotation count mismatch");
  }
  VectorXd row(poseDim(skel));
  row.head<3>() = frame.root;
  for (int k = 0; k < skel.rotatedCount(); ++k) {
    row.segment<6>(3 + 6 * k) = frame.rotations.col(k);
  }
  return row;
}

PoseFrame frameFromRow(const Skeleton& skel, const VectorXd& row) {
  if (row.size() != poseDim(skel)) {
    throw std::invalid_argument("frameFromRow: row length mismatch");
  }
  PoseFrame frame;
  frame.root = row.head<3>();
  frame.rotations.resize(6, skel.rotatedCount());
  for (int k = 0; k < skel.rotatedCount(); ++k) {
    frame.rotations.col(k) = row.segment<6>(3 + 6 * k);
  }
  return frame;
}

MatrixXd flattenPose(const Skeleton& skel, const PoseSequence& seq) {
  MatrixXd flat(seq.frameCount(), poseDim(skel));
  for (Eigen::Index t = 0; t < seq.frameCount(); ++t) {
    flat.row(t) = rowFromFrame(skel, seq.frames[static_cast<std::size_t>(t)]).transpose();
  }
  return flat;
}

PoseSequence unflattenPose(const Skeleton& skel, const MatrixXd& flat, double fps) {
  if (flat.cols() != poseDim(skel)) {
    throw std::invalid_argument("unflattenPose: column count mismatch");
  }
  PoseSequence seq;
  seq.fps = fps;
  seq.frames.reserve(static_cast<std::size_t>(flat.rows()));
  for (Eigen::Index t = 0; t < flat.rows(); ++t) {
    seq.frames.push_back(frameFromRow(skel, flat.row(t).transpose()));
  }
  return seq;
}

std::vector<Matrix3Xd> jointPositions(const Skeleton& skel, const PoseSequence& seq) {
  std::vector<Matrix3Xd> out;
  out.reserve(seq.frames.size());
  for (const PoseFrame& frame : seq.frames) {
    out.push_back(forwardKinematics(skel, frame).positions);
  }
  return out;
}

MatrixXd wristTrack(const Skeleton& skel, const PoseSequence& seq) {
  MatrixXd track(seq.frameCount(), 6);
  for (Eigen::Index t = 0; t < seq.frameCount(); ++t) {
    const FkResult fk = forwardKinematics(skel, seq.frames[static_cast<std::size_t>(t)]);
    track.row(t).head<3>() = fk.positions.col(skel.leftWrist).transpose();
    track.row(t).tail<3>() = fk.positions.col(skel.rightWrist).transpose();
  }
  return track;
}

}  // namespace msynth
