#include "msynth/kin/pose_sequence.hpp"
#include "msynth/kin/proxy_surface.hpp"
#include "msynth/kin/skeleton.hpp"
#include "msynth/rng.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <numbers>

namespace {

using namespace msynth;

Matrix3d rotZ(double angle) {
  return Eigen::AngleAxisd(angle, Vector3d::UnitZ()).toRotationMatrix();
}

Rotation6d randomRotation6(Rng& rng) {
  const Vector3d axis = Vector3d(normal01(rng), normal01(rng), normal01(rng)).normalized();
  const double angle = uniformRange(rng, -std::numbers::pi, std::numbers::pi);
  return matrixToSixd<double>(Eigen::AngleAxisd(angle, axis).toRotationMatrix());
}

PoseFrame randomFrame(const Skeleton& skel, Rng& rng) {
  PoseFrame frame;
  frame.root = Vector3d(normal01(rng), normal01(rng), normal01(rng));
  frame.rotations.resize(6, skel.rotatedCount());
  for (int k = 0; k < skel.rotatedCount(); ++k) {
    frame.rotations.col(k) = randomRotation6(rng);
  }
  return frame;
}

// FK with identity rotations is just cumulative rest offsets from the root.
Matrix3Xd restPositions(const Skeleton& skel, const Vector3d& root) {
  Matrix3Xd pos(3, skel.jointCount());
  pos.col(0) = root;
  for (int i = 1; i < skel.jointCount(); ++i) {
    pos.col(i) = pos.col(skel.parents[i]) + skel.offsets.col(i);
  }
  return pos;
}

Skeleton twoBoneChain() {
  Skeleton s;
  s.jointNames = {"root", "mid", "tip"};
  s.parents = {-1, 0, 1};
  s.offsets.resize(3, 3);
  s.offsets.col(0) = Vector3d::Zero();
  s.offsets.col(1) = Vector3d(1, 0, 0);
  s.offsets.col(2) = Vector3d(1, 0, 0);
  s.rotatedJoints = {0, 1};
  s.leftWrist = 1;
  s.rightWrist = 2;
  s.capsuleRadii = VectorXd::Constant(3, 0.05);
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("skeleton presets satisfy their invariants") {
  const Skeleton full = humanoid24();
  CHECK(full.jointCount() == 24);
  CHECK(full.rotatedCount() == 22);
  CHECK(poseDim(full) == 135);
  CHECK(full.leftWrist == 20);
  CHECK(full.rightWrist == 21);

  const Skeleton desk = stickFigure9();
  CHECK(desk.jointCount() == 9);
  CHECK(desk.rotatedCount() == 4);
  CHECK(poseDim(desk) == 27);
  CHECK(desk.jointNames[static_cast<std::size_t>(desk.leftWrist)] == "l_wrist");
  CHECK(desk.jointNames[static_cast<std::size_t>(desk.rightWrist)] == "r_wrist");
}

TEST_CASE("skeleton validation rejects malformed trees") {
  Skeleton s = stickFigure9();
  s.parents[2] = 7;  // parent after child
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = stickFigure9();
  s.parents[3] = -1;  // second root
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = stickFigure9();
  s.rotatedJoints = {4, 3};  // not ascending
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = stickFigure9();
  s.leftWrist = s.rightWrist;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = stickFigure9();
  s.capsuleRadii(2) = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("fk: identity pose stacks rest offsets") {
  for (const Skeleton& skel : {humanoid24(), stickFigure9()}) {
    PoseFrame frame = PoseFrame::rest(skel);
    frame.root = Vector3d(0.3, -0.1, 0.9);
    const FkResult fk = forwardKinematics(skel, frame);
    CHECK((fk.positions - restPositions(skel, frame.root)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("fk: root shift moves every joint by the same vector") {
  const Skeleton skel = humanoid24();
  Rng rng = makeRng(7);
  PoseFrame frame = randomFrame(skel, rng);
  const FkResult base = forwardKinematics(skel, frame);
  const Vector3d v(0.4, -1.2, 0.7);
  frame.root += v;
  const FkResult moved = forwardKinematics(skel, frame);
  CHECK((moved.positions - (base.positions.colwise() + v)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fk: two-bone chain hand case") {
  const Skeleton chain = twoBoneChain();
  PoseFrame frame = PoseFrame::rest(chain);
  frame.root = Vector3d(5, 5, 5);
  frame.rotations.col(0) = matrixToSixd<double>(rotZ(std::numbers::pi / 2));
  const FkResult fk = forwardKinematics(chain, frame);
  CHECK((fk.positions.col(1) - Vector3d(5, 6, 5)).norm() < 1e-15);
  // tip inherits the root rotation through the unrotated-from-identity mid joint
  CHECK((fk.positions.col(2) - Vector3d(5, 7, 5)).norm() < 1e-15);

  frame.rotations.col(1) = matrixToSixd<double>(rotZ(std::numbers::pi / 2));
  const FkResult bent = forwardKinematics(chain, frame);
  CHECK((bent.positions.col(2) - Vector3d(4, 6, 5)).norm() < 1e-14);
}

TEST_CASE("fk: rigid equivariance") {
  const Skeleton skel = humanoid24();
  Rng rng = makeRng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const PoseFrame frame = randomFrame(skel, rng);
    const FkResult base = forwardKinematics(skel, frame);

    const Matrix3d g = sixdToMatrix<double>(randomRotation6(rng));
    const Vector3d shift(normal01(rng), normal01(rng), normal01(rng));

    PoseFrame moved = frame;
    moved.root = g * frame.root + shift;
    moved.rotations.col(0) =
        matrixToSixd<double>((g * sixdToMatrix<double>(frame.rotations.col(0))).eval());
    const FkResult xf = forwardKinematics(skel, moved);

    const Matrix3Xd expected = (g * base.positions).colwise() + shift;
    CHECK((xf.positions - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("pose flatten/unflatten round trip") {
  const Skeleton skel = stickFigure9();
  Rng rng = makeRng(23);
  PoseSequence seq;
  seq.fps = 30.0;
  for (int t = 0; t < 12; ++t) seq.frames.push_back(randomFrame(skel, rng));

  const MatrixXd flat = flattenPose(skel, seq);
  CHECK(flat.rows() == 12);
  CHECK(flat.cols() == 27);
  const PoseSequence back = unflattenPose(skel, flat, seq.fps);
  REQUIRE(back.frameCount() == seq.frameCount());
  for (int t = 0; t < 12; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    CHECK(back.frames[ut].root == seq.frames[ut].root);
    CHECK(back.frames[ut].rotations == seq.frames[ut].rotations);
  }

  MatrixXd wrong(12, 26);
  CHECK_THROWS_AS(unflattenPose(skel, wrong), std::invalid_argument);

  // row layout: root xyz first, then 6 scalars per rotated joint in order
  const VectorXd row = rowFromFrame(skel, seq.frames[0]);
  CHECK(row.head<3>() == seq.frames[0].root);
  CHECK(row.segment<6>(3) == seq.frames[0].rotations.col(0));
  CHECK(row.tail<6>() == seq.frames[0].rotations.col(3));
}

TEST_CASE("wrist track picks the configured wrist joints") {
  const Skeleton skel = stickFigure9();
  PoseSequence seq;
  seq.frames.push_back(PoseFrame::rest(skel));
  const MatrixXd track = wristTrack(skel, seq);
  const FkResult fk = forwardKinematics(skel, seq.frames[0]);
  CHECK((track.row(0).head<3>().transpose() - fk.positions.col(5)).norm() == 0.0);
  CHECK((track.row(0).tail<3>().transpose() - fk.positions.col(8)).norm() == 0.0);
}

TEST_CASE("proxy surface: count, determinism, rigid attachment") {
  const Skeleton skel = stickFigure9();
  CHECK(proxyPointCount(skel) == 8 * 3 * 6);
  CHECK(proxyPointCount(humanoid24()) == 23 * 3 * 6);

  Rng rng = makeRng(31);
  const PoseFrame frame = randomFrame(skel, rng);
  const Matrix3Xd a = sampleProxySurface(skel, frame);
  const Matrix3Xd b = sampleProxySurface(skel, frame);
  CHECK(a == b);
  CHECK(a.cols() == proxyPointCount(skel));

  PoseFrame moved = frame;
  const Vector3d v(0.2, 0.4, -0.6);
  moved.root += v;
  const Matrix3Xd c = sampleProxySurface(skel, moved);
  CHECK((c - (a.colwise() + v)).cwiseAbs().maxCoeff() < 1e-12);

  // every sample sits exactly on its bone's capsule lateral surface
  const FkResult fk = forwardKinematics(skel, frame);
  Eigen::Index col = 0;
  for (int j = 1; j < skel.jointCount(); ++j) {
    const Vector3d pa = fk.positions.col(skel.parents[j]);
    const Vector3d pb = fk.positions.col(j);
    for (int s = 0; s < skel.proxyRings * skel.proxySegments; ++s, ++col) {
      const Vector3d p = a.col(col);
      const Vector3d ab = pb - pa;
      const double t = (p - pa).dot(ab) / ab.squaredNorm();
      const double radial = (p - (pa + t * ab)).norm();
      CHECK(radial == doctest::Approx(skel.capsuleRadii(j)).epsilon(1e-9));
      CHECK(t > 0.0);
      CHECK(t < 1.0);
    }
  }
}
