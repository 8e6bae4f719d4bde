#include "msynth/eval/harness.hpp"

#include "msynth/parallel.hpp"
#include "msynth/pipeline/contact.hpp"
#include "msynth/pipeline/object_encoder.hpp"

#include <limits>
#include <mutex>

namespace msynth {

Vector6d meanTrainingHands(const std::vector<DatasetRecord>& records) {
  if (records.empty()) throw ConfigError("meanTrainingHands: no records");
  Vector6d sum = Vector6d::Zero();
  Eigen::Index frames = 0;
  for (const DatasetRecord& rec : records) {
    if (rec.gtHands.cols() != 6) throw ConfigError("meanTrainingHands: hands must be frames x 6");
    sum += rec.gtHands.colwise().sum().transpose();
    frames += rec.gtHands.rows();
  }
  if (frames == 0) throw ConfigError("meanTrainingHands: no frames");
  return sum / static_cast<double>(frames);
}

double handTrajectoryError(const MatrixXd& predHands, const MatrixXd& gtHands) {
  if (predHands.rows() != gtHands.rows() || predHands.cols() != 6 || gtHands.cols() != 6) {
    throw ConfigError("handTrajectoryError: hand trajectories must both be frames x 6");
  }
  if (predHands.rows() == 0) throw ConfigError("handTrajectoryError: empty trajectory");
  double sum = 0.0;
  for (Eigen::Index t = 0; t < predHands.rows(); ++t) {
    sum += (predHands.block<1, 3>(t, 0) - gtHands.block<1, 3>(t, 0)).norm();
    sum += (predHands.block<1, 3>(t, 3) - gtHands.block<1, 3>(t, 3)).norm();
  }
  return 100.0 * sum / static_cast<double>(2 * predHands.rows());
}

namespace {

struct SequenceOutcome {
  MetricReport rectified;
  MetricReport unrectified;
  MetricReport gtHands;
  double baselineHandJpe = 0.0;
  double bestHandJpe = 0.0;
};

// Picks the candidate with the smallest MPJPE; first index wins ties.
struct BestBody {
  PoseSequence poses;
  double mpjpe = std::numeric_limits<double>::infinity();
  MatrixXd hands;  // the conditioning hands that produced the winner
};

void consider(BestBody& best, const Skeleton& skel, PoseSequence candidate, const MatrixXd& hands,
              const PoseSequence& gt) {
  const double err = jointErrors(skel, candidate, gt).mpjpe;
  if (err < best.mpjpe) {
    best.mpjpe = err;
    best.poses = std::move(candidate);
    best.hands = hands;
  }
}

}  // namespace

CorpusEvaluation evaluateCorpus(const Stage1Model& stage1, const Stage2Model& stage2,
                                const std::vector<DatasetRecord>& testRecords,
                                const Vector6d& trainMeanHands, const EvalOptions& options) {
  if (testRecords.empty()) throw ConfigError("evaluateCorpus: no test records");
  if (options.bestOf < 1) throw ConfigError("evaluateCorpus: best-of must be at least 1");
  if (stage1.compatHash != stage2.compatHash) {
    throw CheckpointMismatch("evaluateCorpus: stage checkpoints are incompatible (" +
                             stage1.compatHash + " vs " + stage2.compatHash + ")");
  }
  const Skeleton& skel = stage2.skeleton;
  const std::size_t n = testRecords.size();
  std::vector<SequenceOutcome> outcomes(n);
  std::exception_ptr failure;
  std::mutex failureMutex;

  parallelFor(
      n,
      [&](std::size_t idx) {
        try {
          const DatasetRecord& rec = testRecords[idx];
          const ObjectSequence seq = rec.objectSequence();
          const Eigen::Index frames = seq.frames();
          const SdfField sdf =
              bakeSdfGrid(seq.mesh, options.sdfResolution, options.sdfPadding);
          const MatrixXd raw = rawObjectFeatures(seq, stage1.basis);
          const std::uint64_t base = mixSeed(options.seed, static_cast<std::uint64_t>(idx));

          MatrixXd constant(frames, 6);
          constant.rowwise() = trainMeanHands.transpose();

          SequenceOutcome out;
          out.baselineHandJpe = handTrajectoryError(constant, rec.gtHands);
          out.bestHandJpe = std::numeric_limits<double>::infinity();

          BestBody bestRect, bestPlain, bestOracle;
          for (int j = 0; j < options.bestOf; ++j) {
            Rng handRng = makeStream(base, 100 + static_cast<std::uint64_t>(j));
            const MatrixXd hands = sampleHands(stage1, raw, handRng);
            out.bestHandJpe = std::min(out.bestHandJpe, handTrajectoryError(hands, rec.gtHands));
            const MatrixXd rectified =
                rectifyContacts(hands, seq, options.rectifyThreshold).hands;

            Rng rectRng = makeStream(base, 1000 + static_cast<std::uint64_t>(j));
            consider(bestRect, skel, sampleBody(stage2, rectified, seq.fps, rectRng), rectified,
                     rec.poses);
            Rng plainRng = makeStream(base, 2000 + static_cast<std::uint64_t>(j));
            consider(bestPlain, skel, sampleBody(stage2, hands, seq.fps, plainRng), hands,
                     rec.poses);
            Rng oracleRng = makeStream(base, 3000 + static_cast<std::uint64_t>(j));
            consider(bestOracle, skel, sampleBody(stage2, rec.gtHands, seq.fps, oracleRng),
                     rec.gtHands, rec.poses);
          }

          out.rectified =
              evaluateSequence(skel, bestRect.poses, bestRect.hands, rec.poses, rec.gtHands, seq,
                               sdf, options.contactThreshold, options.collisionThreshold);
          out.unrectified =
              evaluateSequence(skel, bestPlain.poses, bestPlain.hands, rec.poses, rec.gtHands, seq,
                               sdf, options.contactThreshold, options.collisionThreshold);
          out.gtHands =
              evaluateSequence(skel, bestOracle.poses, bestOracle.hands, rec.poses, rec.gtHands,
                               seq, sdf, options.contactThreshold, options.collisionThreshold);
          outcomes[idx] = std::move(out);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failureMutex);
          if (!failure) failure = std::current_exception();
        }
      },
      options.workers);
  if (failure) std::rethrow_exception(failure);

  CorpusEvaluation result;
  result.rectified.name = "rectified";
  result.unrectified.name = "unrectified";
  result.gtHands.name = "gt_hands";
  double baselineSum = 0.0, bestSum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.sequenceNames.push_back(testRecords[i].id.empty() ? "seq_" + std::to_string(i)
                                                             : testRecords[i].id);
    result.rectified.rows.push_back(outcomes[i].rectified);
    result.unrectified.rows.push_back(outcomes[i].unrectified);
    result.gtHands.rows.push_back(outcomes[i].gtHands);
    baselineSum += outcomes[i].baselineHandJpe;
    bestSum += outcomes[i].bestHandJpe;
  }
  result.rectified.mean = aggregateReports(result.rectified.rows);
  result.unrectified.mean = aggregateReports(result.unrectified.rows);
  result.gtHands.mean = aggregateReports(result.gtHands.rows);
  result.baselineHandJpe = baselineSum / static_cast<double>(n);
  result.bestOfHandJpe = bestSum / static_cast<double>(n);
  result.table = formatComparisonTable(
      {result.rectified.name, result.unrectified.name, result.gtHands.name},
      {result.rectified.mean, result.unrectified.mean, result.gtHands.mean});
  return result;
}

}  // namespace msynth
