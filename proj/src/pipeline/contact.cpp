#include "msynth/pipeline/contact.hpp"

#include "msynth/geom/nearest.hpp"

#include <stdexcept>

namespace msynth {

std::string handModeName(HandMode mode) {
  switch (mode) {
    case HandMode::None: return "none";
    case HandMode::LeftOnly: return "one_handed(left)";
    case HandMode::RightOnly: return "one_handed(right)";
    case HandMode::TwoHanded: return "two_handed";
  }
  return "none";
}

namespace {

void checkLengths(const MatrixXd& hands, const ObjectSequence& seq) {
  if (hands.cols() != 6) throw ConfigError("hand trajectory must have 6 columns");
  if (hands.rows() != seq.frames())
    throw ConfigError("hand trajectory length does not match object sequence");
  if (!hands.allFinite()) throw ConfigError("hand trajectory has non-finite entries");
}

}  // namespace

RectifyResult rectifyContacts(const MatrixXd& hands, const ObjectSequence& seq,
                              double threshold) {
  checkLengths(hands, seq);
  const Eigen::Index frames = hands.rows();

  std::vector<Matrix3Xd> verts(static_cast<std::size_t>(frames));
  for (Eigen::Index t = 0; t < frames; ++t) verts[static_cast<std::size_t>(t)] = seq.verticesAt(t);

  RectifyResult result;
  result.hands = hands;
  for (int side = 0; side < 2; ++side) {
    const Eigen::Index col = side == 0 ? 0 : 3;
    for (Eigen::Index k = 0; k < frames; ++k) {
      const Vector3d handK = hands.block<1, 3>(k, col).transpose();
      const NearestResult near = nearestVertex(verts[static_cast<std::size_t>(k)], handK);
      if (!(near.distance < threshold)) continue;

      ContactAnchor anchor;
      anchor.hand = side == 0 ? Hand::Left : Hand::Right;
      anchor.startFrame = k;
      anchor.vertexIndex = near.index;
      anchor.offset = handK - verts[static_cast<std::size_t>(k)].col(near.index);
      anchor.anchorRotation = seq.transforms[static_cast<std::size_t>(k)].rotation;

      const Matrix3d anchorInv = anchor.anchorRotation.transpose();
      for (Eigen::Index t = k + 1; t < frames; ++t) {
        const Matrix3d& rot = seq.transforms[static_cast<std::size_t>(t)].rotation;
        const Vector3d attached =
            verts[static_cast<std::size_t>(t)].col(anchor.vertexIndex) + rot * (anchorInv * anchor.offset);
        result.hands.block<1, 3>(t, col) = attached.transpose();
      }
      result.anchors.push_back(anchor);
      break;
    }
  }
  return result;
}

HandMode inferHandMode(const MatrixXd& hands, const ObjectSequence& seq, double threshold) {
  checkLengths(hands, seq);
  bool contact[2] = {false, false};
  for (int side = 0; side < 2; ++side) {
    const Eigen::Index col = side == 0 ? 0 : 3;
    for (Eigen::Index t = 0; t < seq.frames() && !contact[side]; ++t) {
      const Vector3d hand = hands.block<1, 3>(t, col).transpose();
      contact[side] = nearestVertex(seq.verticesAt(t), hand).distance < threshold;
    }
  }
  if (contact[0] && contact[1]) return HandMode::TwoHanded;
  if (contact[0]) return HandMode::LeftOnly;
  if (contact[1]) return HandMode::RightOnly;
  return HandMode::None;
}

}  // namespace msynth
