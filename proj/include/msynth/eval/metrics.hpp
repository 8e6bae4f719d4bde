#pragma once

#include "msynth/geom/object_sequence.hpp"
#include "msynth/geom/sdf.hpp"
#include "msynth/kin/pose_sequence.hpp"

#include <string>
#include <vector>

namespace msynth {

/// Per-sequence metric row. Distances in centimeters, collision in percent,
/// contact scores in [0,1], o_root dimensionless.
struct MetricReport {
  double handJpe = 0.0;
  double mpjpe = 0.0;
  double mpvpe = 0.0;
  double tRoot = 0.0;
  double oRoot = 0.0;
  double fs = 0.0;
  double collisionPct = 0.0;
  double cPrec = 0.0;
  double cRec = 0.0;
  double f1 = 0.0;
};

struct JointErrors {
  double handJpe = 0.0;
  double mpjpe = 0.0;
  double mpvpe = 0.0;
};

struct RootErrors {
  double tRoot = 0.0;
  double oRoot = 0.0;
};

struct ContactScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Mean Euclidean error over frames for wrists / all joints / proxy-surface
/// vertices, in centimeters. Throws ConfigError on mismatched lengths or
/// rotation widths.
JointErrors jointErrors(const Skeleton& skel, const PoseSequence& pred, const PoseSequence& gt);

/// Mean root translation distance (cm) and mean ||R_pred R_gt^-1 - I||_F.
/// Root orientation of a frame is the world rotation of joint 0.
RootErrors rootErrors(const Skeleton& skel, const PoseSequence& pred, const PoseSequence& gt);

/// Percentage of frames where any proxy vertex sits deeper than `threshold`
/// inside the object (signed distance < -threshold, strictly). The field is
/// queried in the object's local frame via each frame's rigid transform.
double collisionPercentage(const Skeleton& skel, const PoseSequence& pred, const SdfField& sdf,
                           const std::vector<RigidTransform>& transforms, double threshold = 0.04);

/// Binary per-frame/per-hand contact labels from `threshold` on the nearest
/// mesh-vertex distance, for predicted and ground-truth hands independently;
/// precision/recall/F1 over all frame-hand pairs. Hands are frames x 6.
ContactScores contactMetrics(const MatrixXd& predHands, const MatrixXd& gtHands,
                             const ObjectSequence& seq, double threshold = 0.05);

/// Height-weighted horizontal foot travel per frame step, in centimeters:
/// sum over feet below `heightThreshold` of ||dxy|| * (2 - 2^(h/H)).
/// Skeletons without foot joints report 0.
double footSliding(const Skeleton& skel, const PoseSequence& pred, double heightThreshold = 0.05);

/// Full per-sequence row against ground truth.
MetricReport evaluateSequence(const Skeleton& skel, const PoseSequence& pred,
                              const MatrixXd& predHands, const PoseSequence& gt,
                              const MatrixXd& gtHands, const ObjectSequence& seq,
                              const SdfField& objectSdf, double contactThreshold = 0.05,
                              double collisionThreshold = 0.04);

/// Uniform mean over per-sequence rows (fixed summation order).
MetricReport aggregateReports(const std::vector<MetricReport>& rows);

/// Table header + one row per sequence + aggregate line, fixed precision.
std::string formatReportTable(const std::vector<std::string>& names,
                              const std::vector<MetricReport>& rows, const MetricReport& mean);

/// One row per variant, no aggregate line; first column labeled "variant".
std::string formatComparisonTable(const std::vector<std::string>& names,
                                  const std::vector<MetricReport>& rows);

}  // namespace msynth
