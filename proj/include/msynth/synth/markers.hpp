#pragma once

#include "msynth/geom/object_sequence.hpp"

#include <vector>

namespace msynth {

/// Per-frame rigid fit of marker observations against their rest layout.
struct MarkerFit {
  Trajectory trajectory;
  VectorXd scales;           // fitted similarity scale per frame
  bool scaleWarning = false; // any frame's scale off unity by more than 1%
};

/// Solves one similarity transform per frame mapping `restMarkers` (3 x M)
/// onto `observed[t]` in the least-squares sense. Needs at least three
/// non-collinear markers; throws ConfigError otherwise. Scales far from 1
/// only raise the warning flag, the fitted transforms keep them.
MarkerFit solveObjectPoseFromMarkers(const Matrix3Xd& restMarkers,
                                     const std::vector<Matrix3Xd>& observed, double fps = 30.0);

}  // namespace msynth
