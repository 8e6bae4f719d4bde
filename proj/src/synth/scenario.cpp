#include "msynth/synth/scenario.hpp"

#include "msynth/geom/nearest.hpp"
#include "msynth/synth/ik.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>

namespace msynth {

std::string objectFamilyName(ObjectFamily family) {
  switch (family) {
    case ObjectFamily::Box: return "box";
    case ObjectFamily::Cylinder: return "cylinder";
    case ObjectFamily::Lamp: return "lamp";
  }
  throw ConfigError("objectFamilyName: bad value");
}

std::string motionFamilyName(MotionFamily family) {
  switch (family) {
    case MotionFamily::Lift: return "lift";
    case MotionFamily::Drag: return "drag";
    case MotionFamily::Push: return "push";
    case MotionFamily::Rotate: return "rotate";
  }
  throw ConfigError("motionFamilyName: bad value");
}

ObjectFamily parseObjectFamily(const std::string& name) {
  if (name == "box") return ObjectFamily::Box;
  if (name == "cylinder") return ObjectFamily::Cylinder;
  if (name == "lamp") return ObjectFamily::Lamp;
  throw ConfigError("unknown object family: " + name);
}

MotionFamily parseMotionFamily(const std::string& name) {
  if (name == "lift") return MotionFamily::Lift;
  if (name == "drag") return MotionFamily::Drag;
  if (name == "push") return MotionFamily::Push;
  if (name == "rotate") return MotionFamily::Rotate;
  throw ConfigError("unknown motion family: " + name);
}

void ScenarioSpec::validate() const {
  if (frames < 2) throw ConfigError("ScenarioSpec: need at least 2 frames");
  if (!(fps > 0.0)) throw ConfigError("ScenarioSpec: fps must be positive");
  if (subject < 0) throw ConfigError("ScenarioSpec: subject must be non-negative");
  if (handMode == HandMode::None) throw ConfigError("ScenarioSpec: scenario needs a grasping hand");
}

ObjectSequence DatasetRecord::objectSequence() const {
  ObjectSequence seq;
  seq.mesh = mesh;
  seq.transforms = trajectory.transforms;
  seq.fps = trajectory.fps;
  return seq;
}

namespace {

constexpr double kDeskHeight = 0.8;
constexpr double kClearance = 0.055;  // hands stay this far from the mesh outside contact
constexpr double kSnapOff = 0.1;      // approach/retreat standoff from the grasp vertex
constexpr std::uint64_t kStyleStream = 0x5ce9a5107357c1full;

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

Matrix3d rotationZ(double angle) {
  return Eigen::AngleAxisd(angle, Vector3d::UnitZ()).toRotationMatrix();
}

struct ArmRig {
  int shoulder = -1;
  int elbow = -1;
  int wrist = -1;
  int shoulderCol = -1;
  int elbowCol = -1;
  Vector3d shoulderRest = Vector3d::Zero();  // shoulder position relative to the root
  Vector3d restUpper = Vector3d::Zero();
  Vector3d restLower = Vector3d::Zero();
  double minReach = 0.0;
  double maxReach = 0.0;
};

int rotatedColumn(const Skeleton& skel, int joint) {
  for (int c = 0; c < skel.rotatedCount(); ++c) {
    if (skel.rotatedJoints[static_cast<std::size_t>(c)] == joint) return c;
  }
  return -1;
}

ArmRig buildArm(const Skeleton& skel, int wrist) {
  ArmRig rig;
  rig.wrist = wrist;
  if (wrist <= 0 || wrist >= skel.jointCount()) throw ConfigError("generateScenario: skeleton has no wrist");
  rig.elbow = skel.parents[static_cast<std::size_t>(wrist)];
  if (rig.elbow <= 0) throw ConfigError("generateScenario: wrist has no elbow");
  rig.shoulder = skel.parents[static_cast<std::size_t>(rig.elbow)];
  if (rig.shoulder <= 0) throw ConfigError("generateScenario: elbow has no shoulder");
  rig.shoulderCol = rotatedColumn(skel, rig.shoulder);
  rig.elbowCol = rotatedColumn(skel, rig.elbow);
  if (rig.shoulderCol < 0 || rig.elbowCol < 0 || rotatedColumn(skel, wrist) >= 0) {
    throw ConfigError("generateScenario: arms must rotate at shoulder and elbow with a fixed wrist");
  }
  for (int a = rig.shoulder; a >= 0; a = skel.parents[static_cast<std::size_t>(a)]) {
    if (a != rig.shoulder && rotatedColumn(skel, a) >= 0) {
      throw ConfigError("generateScenario: the trunk above the shoulders must be unrotated");
    }
    if (a != rig.shoulder) rig.shoulderRest += skel.offsets.col(a);
  }
  rig.shoulderRest += skel.offsets.col(rig.shoulder) - skel.offsets.col(0);
  rig.restUpper = skel.offsets.col(rig.elbow);
  rig.restLower = skel.offsets.col(wrist);
  const double l1 = rig.restUpper.norm();
  const double l2 = rig.restLower.norm();
  rig.minReach = std::abs(l1 - l2);
  rig.maxReach = l1 + l2;
  return rig;
}

struct SubjectStyle {
  Vector3d rootRest = Vector3d::Zero();
  double follow = 0.8;  // fraction of object travel mirrored by the root
  double readyX = 0.12;
  double readyOut = 0.32;
  double readyZ = 0.95;
};

SubjectStyle drawStyle(int subject) {
  Rng rng = makeStream(kStyleStream, static_cast<std::uint64_t>(subject));
  SubjectStyle style;
  const double rootZ = uniformRange(rng, 0.56, 0.63);
  style.rootRest = Vector3d(uniformRange(rng, -0.04, 0.02), 0.0, rootZ);
  style.follow = uniformRange(rng, 0.65, 0.9);
  style.readyX = uniformRange(rng, 0.10, 0.15);
  style.readyOut = uniformRange(rng, 0.30, 0.36);
  style.readyZ = rootZ + uniformRange(rng, 0.33, 0.40);
  return style;
}

struct MotionDraw {
  GraspableMesh object;
  Vector3d restCenter = Vector3d::Zero();
  Vector3d travel = Vector3d::Zero();  // translation families
  double spin = 0.0;                   // rotate family, radians about +z
};

MotionDraw drawMotion(const ScenarioSpec& spec, Rng& rng) {
  MotionDraw draw;
  switch (spec.object) {
    case ObjectFamily::Box:
      draw.object = makeBox(uniformRange(rng, 0.10, 0.18), uniformRange(rng, 0.14, 0.22),
                            uniformRange(rng, 0.08, 0.16));
      break;
    case ObjectFamily::Cylinder:
      draw.object = makeCylinder(uniformRange(rng, 0.05, 0.09), uniformRange(rng, 0.10, 0.20));
      break;
    case ObjectFamily::Lamp:
      draw.object = makeLamp(uniformRange(rng, 0.06, 0.10), uniformRange(rng, 0.28, 0.40), 0.08);
      break;
  }
  draw.restCenter =
      Vector3d(uniformRange(rng, 0.28, 0.36), uniformRange(rng, -0.06, 0.06), kDeskHeight);
  switch (spec.motion) {
    case MotionFamily::Lift:
      draw.travel = Vector3d(uniformRange(rng, -0.04, 0.04), uniformRange(rng, -0.04, 0.04),
                             uniformRange(rng, 0.10, 0.20));
      break;
    case MotionFamily::Drag: {
      const double side = uniformInt(rng, 0, 1) == 0 ? -1.0 : 1.0;
      draw.travel =
          Vector3d(uniformRange(rng, -0.04, 0.08), side * uniformRange(rng, 0.06, 0.12), 0.0);
      break;
    }
    case MotionFamily::Push:
      draw.travel = Vector3d(uniformRange(rng, 0.06, 0.14), uniformRange(rng, -0.04, 0.04), 0.0);
      break;
    case MotionFamily::Rotate: {
      const double side = uniformInt(rng, 0, 1) == 0 ? -1.0 : 1.0;
      draw.spin = side * uniformRange(rng, 0.5, 1.6);
      break;
    }
  }
  return draw;
}

struct Phases {
  Eigen::Index approach = 1;  // frames before contact
  Eigen::Index contact = 1;   // frames with the object in hand
  Eigen::Index retreat = 0;
};

Phases splitPhases(Eigen::Index frames) {
  Phases p;
  p.approach = std::max<Eigen::Index>(1, (frames * 25 + 50) / 100);
  p.retreat = std::max<Eigen::Index>(1, frames / 5);
  while (p.approach + p.retreat + 1 > frames) {
    if (p.retreat > 0) {
      --p.retreat;
    } else {
      --p.approach;
    }
  }
  p.contact = frames - p.approach - p.retreat;
  return p;
}

}  // namespace

DatasetRecord generateScenario(const ScenarioSpec& spec, const Skeleton& skeleton, Rng& rng) {
  spec.validate();
  skeleton.validate();
  const ArmRig left = buildArm(skeleton, skeleton.leftWrist);
  const ArmRig right = buildArm(skeleton, skeleton.rightWrist);
  const SubjectStyle style = drawStyle(spec.subject);
  const Eigen::Index frames = spec.frames;
  const Phases phases = splitPhases(frames);
  const Eigen::Index contactStart = phases.approach;
  const Eigen::Index contactEnd = phases.approach + phases.contact;  // exclusive

  const bool grasps[2] = {spec.handMode == HandMode::LeftOnly || spec.handMode == HandMode::TwoHanded,
                          spec.handMode == HandMode::RightOnly || spec.handMode == HandMode::TwoHanded};

  for (int attempt = 0; attempt < 32; ++attempt) {
    const MotionDraw draw = drawMotion(spec, rng);

    ObjectSequence seq;
    seq.mesh = draw.object.mesh;
    seq.fps = spec.fps;
    seq.transforms.resize(static_cast<std::size_t>(frames));
    for (Eigen::Index t = 0; t < frames; ++t) {
      double s = 0.0;
      if (t >= contactEnd - 1) {
        s = 1.0;
      } else if (t > contactStart) {
        s = smoothstep(static_cast<double>(t - contactStart) /
                       static_cast<double>(phases.contact - 1));
      }
      RigidTransform tf;
      tf.rotation = draw.spin == 0.0 ? Matrix3d::Identity() : rotationZ(draw.spin * s);
      tf.translation = draw.restCenter + s * draw.travel;
      seq.transforms[static_cast<std::size_t>(t)] = tf;
    }

    std::vector<Matrix3Xd> verts(static_cast<std::size_t>(frames));
    for (Eigen::Index t = 0; t < frames; ++t) verts[static_cast<std::size_t>(t)] = seq.verticesAt(t);

    // Wrist targets per hand and frame.
    MatrixXd targets(frames, 6);
    bool ok = true;
    for (int h = 0; h < 2 && ok; ++h) {
      const double side = h == 0 ? 1.0 : -1.0;
      const Vector3d ready(style.readyX, side * style.readyOut, style.readyZ);
      if (!grasps[h]) {
        targets.middleCols(3 * h, 3).rowwise() = ready.transpose();
        continue;
      }
      const Eigen::Index graspIdx = h == 0 ? draw.object.leftGrasp : draw.object.rightGrasp;
      const Vector3d graspStart = seq.vertexAt(contactStart, graspIdx);
      const Vector3d graspEnd = seq.vertexAt(contactEnd - 1, graspIdx);
      const Vector3d preGrasp = graspStart + kSnapOff * (ready - graspStart).normalized();
      const Vector3d postGrasp = graspEnd + kSnapOff * (ready - graspEnd).normalized();
      for (Eigen::Index t = 0; t < frames; ++t) {
        Vector3d p;
        if (t < contactStart) {
          const double u = contactStart > 1
                               ? static_cast<double>(t) / static_cast<double>(contactStart - 1)
                               : 0.0;
          p = ready + smoothstep(u) * (preGrasp - ready);
        } else if (t < contactEnd) {
          p = seq.vertexAt(t, graspIdx);
        } else {
          const double u = phases.retreat > 1 ? static_cast<double>(t - contactEnd) /
                                                    static_cast<double>(phases.retreat - 1)
                                              : 0.0;
          p = postGrasp + smoothstep(u) * (ready - postGrasp);
        }
        targets.block<1, 3>(t, 3 * h) = p.transpose();
      }
    }

    // Clearance: any hand-frame pair without a contact label keeps its margin.
    for (int h = 0; h < 2 && ok; ++h) {
      for (Eigen::Index t = 0; t < frames && ok; ++t) {
        if (grasps[h] && t >= contactStart && t < contactEnd) continue;
        const Vector3d p = targets.block<1, 3>(t, 3 * h).transpose();
        if (nearestVertex(verts[static_cast<std::size_t>(t)], p).distance < kClearance) ok = false;
      }
    }
    if (!ok) continue;

    // Root follows the object's horizontal travel, capped to a bounded offset.
    PoseSequence poses;
    poses.fps = spec.fps;
    poses.frames.resize(static_cast<std::size_t>(frames), PoseFrame::rest(skeleton));
    const Vector3d hintLeft(-0.3, 0.4, -1.0);
    const Vector3d hintRight(-0.3, -0.4, -1.0);
    for (Eigen::Index t = 0; t < frames && ok; ++t) {
      Vector3d follow = seq.transforms[static_cast<std::size_t>(t)].translation - draw.restCenter;
      follow.z() = 0.0;
      follow.x() = std::clamp(follow.x(), -0.22, 0.22);
      follow.y() = std::clamp(follow.y(), -0.22, 0.22);
      PoseFrame& frame = poses.frames[static_cast<std::size_t>(t)];
      frame.root = style.rootRest + style.follow * follow;
      for (int h = 0; h < 2; ++h) {
        const ArmRig& rig = h == 0 ? left : right;
        const Vector3d shoulder = frame.root + rig.shoulderRest;
        const Vector3d target = targets.block<1, 3>(t, 3 * h).transpose();
        const double d = (target - shoulder).norm();
        if (d < rig.minReach + 0.01 || d > rig.maxReach - 0.005) {
          ok = false;
          break;
        }
        const TwoBoneSolution sol =
            twoBoneIk(shoulder, target, rig.restUpper, rig.restLower, h == 0 ? hintLeft : hintRight);
        if (!sol.reachable) {
          ok = false;
          break;
        }
        frame.rotations.col(rig.shoulderCol) = matrixToSixd<double>(sol.upper);
        frame.rotations.col(rig.elbowCol) = matrixToSixd<double>(sol.upper.transpose() * sol.lower);
      }
    }
    if (!ok) continue;

    DatasetRecord record;
    record.subject = spec.subject;
    record.objectFamily = spec.object;
    record.motionFamily = spec.motion;
    record.handMode = spec.handMode;
    record.seed = spec.seed;
    record.mesh = draw.object.mesh;
    record.trajectory.transforms = seq.transforms;
    record.trajectory.fps = spec.fps;
    record.poses = std::move(poses);
    record.gtHands = wristTrack(skeleton, record.poses);
    record.contactLabels = Eigen::MatrixXi::Zero(frames, 2);
    for (int h = 0; h < 2; ++h) {
      if (!grasps[h]) continue;
      for (Eigen::Index t = contactStart; t < contactEnd; ++t) record.contactLabels(t, h) = 1;
    }
    return record;
  }
  throw ConfigError("generateScenario: no reachable configuration after 32 draws");
}

}  // namespace msynth
