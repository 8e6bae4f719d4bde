#pragma once

#include "msynth/geom/object_sequence.hpp"

#include <string>
#include <vector>

namespace msynth {

enum class Hand { Left = 0, Right = 1 };

enum class HandMode { None, LeftOnly, RightOnly, TwoHanded };

std::string handModeName(HandMode mode);

/// First-contact attachment of one hand to the object: at frame
/// `startFrame` the hand came within the contact threshold of vertex
/// `vertexIndex`, with offset p = H_k - V_k^i under rotation R_k.
struct ContactAnchor {
  Hand hand = Hand::Left;
  Eigen::Index startFrame = 0;   // k
  Eigen::Index vertexIndex = 0;  // i
  Vector3d offset = Vector3d::Zero();
  Matrix3d anchorRotation = Matrix3d::Identity();
};

struct RectifyResult {
  MatrixXd hands;  // frames x 6, same layout as the input
  std::vector<ContactAnchor> anchors;
};

/// Contact rectification. Per hand, scan for the first frame k whose
/// distance to the current-frame mesh vertices drops strictly below the
/// threshold; from then on the hand rides the anchor vertex rigidly:
///   H_t = V_t^i + R_t R_k^{-1} p   for t > k.
/// Frames up to and including k are returned unchanged, and a hand that
/// never gets close enough is returned untouched with no anchor. Once a
/// hand attaches it stays attached to the end of the sequence.
RectifyResult rectifyContacts(const MatrixXd& hands, const ObjectSequence& seq,
                              double threshold = 0.03);

/// A hand counts as grasping iff some frame brings it strictly below the
/// threshold; both hands -> TwoHanded, one -> that side, neither -> None.
HandMode inferHandMode(const MatrixXd& hands, const ObjectSequence& seq,
                       double threshold = 0.03);

}  // namespace msynth
