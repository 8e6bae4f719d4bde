#pragma once

#include "msynth/pipeline/contact.hpp"

#include <filesystem>

namespace msynth {

/// Motion text format, version-tagged:
///   msynth-motion v1
///   fps <value>
///   rotated <rotated joint count>
///   frames <count>
///   <index> <root xyz> <6 per rotated joint> <left wrist xyz> <right wrist xyz>
///   anchors <count>
///   <left|right> <start frame> <vertex index> <offset xyz> <9 rotation entries, row-major>
/// Pose rows use the flattened layout from kin; wrist positions are stored
/// alongside so consumers do not need the skeleton to read hands.
struct MotionData {
  MatrixXd poseFlat;  // frames x (3 + 6 * rotated)
  MatrixXd hands;     // frames x 6
  std::vector<ContactAnchor> anchors;
  double fps = 30.0;
};

void saveMotion(const MotionData& motion, const std::filesystem::path& path);
MotionData loadMotion(const std::filesystem::path& path);

}  // namespace msynth
