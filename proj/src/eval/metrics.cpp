#include "msynth/eval/metrics.hpp"

#include "msynth/geom/nearest.hpp"
#include "msynth/kin/proxy_surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace msynth {

namespace {

void checkPair(const Skeleton& skel, const PoseSequence& pred, const PoseSequence& gt) {
  if (pred.frameCount() != gt.frameCount()) throw ConfigError("metric: frame count mismatch");
  if (pred.frameCount() == 0) throw ConfigError("metric: empty sequence");
  for (const PoseFrame& f : pred.frames) {
    if (f.rotations.cols() != skel.rotatedCount()) throw ConfigError("metric: pose width mismatch");
  }
  for (const PoseFrame& f : gt.frames) {
    if (f.rotations.cols() != skel.rotatedCount()) throw ConfigError("metric: pose width mismatch");
  }
}

}  // namespace

JointErrors jointErrors(const Skeleton& skel, const PoseSequence& pred, const PoseSequence& gt) {
  checkPair(skel, pred, gt);
  const Eigen::Index frames = pred.frameCount();
  double handSum = 0.0, jointSum = 0.0, vertexSum = 0.0;
  Eigen::Index handCount = 0, jointCount = 0, vertexCount = 0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const FkResult fkPred = forwardKinematics(skel, pred.frames[static_cast<std::size_t>(t)]);
    const FkResult fkGt = forwardKinematics(skel, gt.frames[static_cast<std::size_t>(t)]);
    for (const int wrist : {skel.leftWrist, skel.rightWrist}) {
      handSum += (fkPred.positions.col(wrist) - fkGt.positions.col(wrist)).norm();
      ++handCount;
    }
    jointSum += (fkPred.positions - fkGt.positions).colwise().norm().sum();
    jointCount += skel.jointCount();
    const Matrix3Xd proxyPred = sampleProxySurface(skel, fkPred);
    const Matrix3Xd proxyGt = sampleProxySurface(skel, fkGt);
    vertexSum += (proxyPred - proxyGt).colwise().norm().sum();
    vertexCount += proxyPred.cols();
  }
  JointErrors out;
  out.handJpe = 100.0 * handSum / static_cast<double>(handCount);
  out.mpjpe = 100.0 * jointSum / static_cast<double>(jointCount);
  out.mpvpe = 100.0 * vertexSum / static_cast<double>(vertexCount);
  return out;
}

RootErrors rootErrors(const Skeleton& skel, const PoseSequence& pred, const PoseSequence& gt) {
  checkPair(skel, pred, gt);
  const Eigen::Index frames = pred.frameCount();
  double tSum = 0.0, oSum = 0.0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const PoseFrame& fp = pred.frames[static_cast<std::size_t>(t)];
    const PoseFrame& fg = gt.frames[static_cast<std::size_t>(t)];
    tSum += (fp.root - fg.root).norm();
    const FkResult fkPred = forwardKinematics(skel, fp);
    const FkResult fkGt = forwardKinematics(skel, fg);
    const Matrix3d diff = fkPred.rotations[0] * fkGt.rotations[0].transpose() - Matrix3d::Identity();
    oSum += diff.norm();  // Frobenius
  }
  RootErrors out;
  out.tRoot = 100.0 * tSum / static_cast<double>(frames);
  out.oRoot = oSum / static_cast<double>(frames);
  return out;
}

double collisionPercentage(const Skeleton& skel, const PoseSequence& pred, const SdfField& sdf,
                           const std::vector<RigidTransform>& transforms, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("collisionPercentage: threshold must be positive");
  const Eigen::Index frames = pred.frameCount();
  if (frames == 0) throw ConfigError("collisionPercentage: empty sequence");
  if (static_cast<Eigen::Index>(transforms.size()) != frames) {
    throw ConfigError("collisionPercentage: transform count mismatch");
  }
  Eigen::Index colliding = 0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Matrix3Xd proxy = sampleProxySurface(skel, pred.frames[static_cast<std::size_t>(t)]);
    const RigidTransform toLocal = transforms[static_cast<std::size_t>(t)].inverse();
    bool hit = false;
    for (Eigen::Index i = 0; i < proxy.cols() && !hit; ++i) {
      const double d = sdfQuery(sdf, toLocal.apply(proxy.col(i)));
      if (d < -threshold) hit = true;
    }
    if (hit) ++colliding;
  }
  return 100.0 * static_cast<double>(colliding) / static_cast<double>(frames);
}

ContactScores contactMetrics(const MatrixXd& predHands, const MatrixXd& gtHands,
                             const ObjectSequence& seq, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("contactMetrics: threshold must be positive");
  if (predHands.rows() != gtHands.rows() || predHands.cols() != 6 || gtHands.cols() != 6) {
    throw ConfigError("contactMetrics: hand trajectories must both be frames x 6");
  }
  if (predHands.rows() != seq.frames()) throw ConfigError("contactMetrics: frame count mismatch");

  Eigen::Index tp = 0, fp = 0, fn = 0;
  for (Eigen::Index t = 0; t < predHands.rows(); ++t) {
    const Matrix3Xd verts = seq.verticesAt(t);
    for (int h = 0; h < 2; ++h) {
      const Vector3d hp = predHands.block<1, 3>(t, 3 * h).transpose();
      const Vector3d hg = gtHands.block<1, 3>(t, 3 * h).transpose();
      const bool p = nearestVertex(verts, hp).distance < threshold;
      const bool g = nearestVertex(verts, hg).distance < threshold;
      if (p && g) ++tp;
      else if (p) ++fp;
      else if (g) ++fn;
    }
  }
  ContactScores out;
  out.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                              : (fn == 0 ? 1.0 : 0.0);
  out.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                           : (fp == 0 ? 1.0 : 0.0);
  out.f1 = out.precision + out.recall > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

double footSliding(const Skeleton& skel, const PoseSequence& pred, double heightThreshold) {
  if (!(heightThreshold > 0.0)) throw ConfigError("footSliding: threshold must be positive");
  const Eigen::Index frames = pred.frameCount();
  if (skel.footJoints.empty() || frames < 2) return 0.0;
  std::vector<Matrix3Xd> positions(static_cast<std::size_t>(frames));
  for (Eigen::Index t = 0; t < frames; ++t) {
    positions[static_cast<std::size_t>(t)] =
        forwardKinematics(skel, pred.frames[static_cast<std::size_t>(t)]).positions;
  }
  double sum = 0.0;
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (const int foot : skel.footJoints) {
      const Vector3d now = positions[static_cast<std::size_t>(t)].col(foot);
      const Vector3d before = positions[static_cast<std::size_t>(t - 1)].col(foot);
      const double h = now.z();
      if (!(h < heightThreshold)) continue;
      const double dxy = (now.head<2>() - before.head<2>()).norm();
      const double weight = 2.0 - std::exp2(std::min(h, heightThreshold) / heightThreshold);
      sum += dxy * weight;
    }
  }
  return 100.0 * sum / static_cast<double>(frames - 1);
}

MetricReport evaluateSequence(const Skeleton& skel, const PoseSequence& pred,
                              const MatrixXd& predHands, const PoseSequence& gt,
                              const MatrixXd& gtHands, const ObjectSequence& seq,
                              const SdfField& objectSdf, double contactThreshold,
                              double collisionThreshold) {
  MetricReport row;
  const JointErrors je = jointErrors(skel, pred, gt);
  row.handJpe = je.handJpe;
  row.mpjpe = je.mpjpe;
  row.mpvpe = je.mpvpe;
  const RootErrors re = rootErrors(skel, pred, gt);
  row.tRoot = re.tRoot;
  row.oRoot = re.oRoot;
  row.fs = footSliding(skel, pred);
  row.collisionPct = collisionPercentage(skel, pred, objectSdf, seq.transforms, collisionThreshold);
  const ContactScores cs = contactMetrics(predHands, gtHands, seq, contactThreshold);
  row.cPrec = cs.precision;
  row.cRec = cs.recall;
  row.f1 = cs.f1;
  return row;
}

MetricReport aggregateReports(const std::vector<MetricReport>& rows) {
  MetricReport mean;
  if (rows.empty()) return mean;
  for (const MetricReport& r : rows) {
    mean.handJpe += r.handJpe;
    mean.mpjpe += r.mpjpe;
    mean.mpvpe += r.mpvpe;
    mean.tRoot += r.tRoot;
    mean.oRoot += r.oRoot;
    mean.fs += r.fs;
    mean.collisionPct += r.collisionPct;
    mean.cPrec += r.cPrec;
    mean.cRec += r.cRec;
    mean.f1 += r.f1;
  }
  const double n = static_cast<double>(rows.size());
  mean.handJpe /= n;
  mean.mpjpe /= n;
  mean.mpvpe /= n;
  mean.tRoot /= n;
  mean.oRoot /= n;
  mean.fs /= n;
  mean.collisionPct /= n;
  mean.cPrec /= n;
  mean.cRec /= n;
  mean.f1 /= n;
  return mean;
}

namespace {

std::string formatMetricTable(const char* firstColumn, const std::vector<std::string>& names,
                              const std::vector<MetricReport>& rows, const MetricReport* mean) {
  if (names.size() != rows.size()) throw ConfigError("formatMetricTable: name/row count mismatch");
  std::size_t label = std::max(std::string(firstColumn).size(), std::size_t{9});
  for (const std::string& n : names) label = std::max(label, n.size());

  std::ostringstream out;
  out << std::setprecision(4) << std::fixed;
  const char* columns[] = {"Hand JPE", "MPJPE", "MPVPE",      "T_root", "O_root",
                           "FS",       "Collision%", "C_prec", "C_rec",  "F1"};
  out << std::left << std::setw(static_cast<int>(label) + 2) << firstColumn << std::right;
  for (const char* c : columns) out << std::setw(11) << c;
  out << "\n";
  auto emit = [&](const std::string& name, const MetricReport& r) {
    out << std::left << std::setw(static_cast<int>(label) + 2) << name << std::right;
    for (const double v : {r.handJpe, r.mpjpe, r.mpvpe, r.tRoot, r.oRoot, r.fs, r.collisionPct,
                           r.cPrec, r.cRec, r.f1}) {
      out << std::setw(11) << v;
    }
    out << "\n";
  };
  for (std::size_t i = 0; i < rows.size(); ++i) emit(names[i], rows[i]);
  if (mean != nullptr) emit("aggregate", *mean);
  return out.str();
}

}  // namespace

std::string formatReportTable(const std::vector<std::string>& names,
                              const std::vector<MetricReport>& rows, const MetricReport& mean) {
  return formatMetricTable("sequence", names, rows, &mean);
}

std::string formatComparisonTable(const std::vector<std::string>& names,
                                  const std::vector<MetricReport>& rows) {
  return formatMetricTable("variant", names, rows, nullptr);
}

}  // namespace msynth
