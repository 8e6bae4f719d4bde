#pragma once

#include "msynth/geom/object_sequence.hpp"
#include "msynth/kin/pose_sequence.hpp"
#include "msynth/pipeline/contact.hpp"
#include "msynth/rng.hpp"
#include "msynth/synth/primitives.hpp"

#include <string>

namespace msynth {

enum class ObjectFamily { Box, Cylinder, Lamp };
enum class MotionFamily { Lift, Drag, Push, Rotate };

std::string objectFamilyName(ObjectFamily family);
std::string motionFamilyName(MotionFamily family);
ObjectFamily parseObjectFamily(const std::string& name);
MotionFamily parseMotionFamily(const std::string& name);

/// One synthetic desk scenario to generate. `subject` selects a deterministic
/// body/style variation that is shared by every scenario of that subject.
struct ScenarioSpec {
  ObjectFamily object = ObjectFamily::Box;
  MotionFamily motion = MotionFamily::Lift;
  HandMode handMode = HandMode::TwoHanded;
  int subject = 0;
  Eigen::Index frames = 30;
  double fps = 30.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

/// Generated ground-truth sequence: rigid object motion, full-body poses,
/// wrist track, and per-frame/per-hand contact labels. Wrists sit exactly on
/// the annotated grasp vertices during labeled frames and keep a clearance
/// margin above the contact threshold everywhere else.
struct DatasetRecord {
  std::string id;
  int subject = 0;
  ObjectFamily objectFamily = ObjectFamily::Box;
  MotionFamily motionFamily = MotionFamily::Lift;
  HandMode handMode = HandMode::TwoHanded;
  std::uint64_t seed = 0;

  Mesh mesh;
  Trajectory trajectory;
  PoseSequence poses;
  MatrixXd gtHands;       // frames x 6, forward kinematics of the poses
  Eigen::MatrixXi contactLabels;  // frames x 2, column 0 = left

  std::string subjectSplit = "train";
  std::string objectSplit = "train";

  ObjectSequence objectSequence() const;
};

/// Draws scenario parameters from `rng` (retrying draws that leave a hand
/// unreachable or too close to the object in a no-contact frame), animates the
/// object along a smoothstep-timed path, attaches grasping wrists to the
/// object's grasp vertices, and solves the arms analytically per frame.
/// Throws ConfigError when no valid draw is found after a bounded number of
/// retries.
DatasetRecord generateScenario(const ScenarioSpec& spec, const Skeleton& skeleton, Rng& rng);

}  // namespace msynth
