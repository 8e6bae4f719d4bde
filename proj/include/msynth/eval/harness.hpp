#pragma once

#include "msynth/eval/metrics.hpp"
#include "msynth/pipeline/stages.hpp"
#include "msynth/synth/corpus.hpp"

namespace msynth {

struct EvalOptions {
  int bestOf = 20;             // samples per sequence and variant, best MPJPE kept
  std::uint64_t seed = 2025;
  int workers = 0;
  double contactThreshold = 0.05;
  double collisionThreshold = 0.04;
  double rectifyThreshold = 0.03;
  int sdfResolution = 32;
  double sdfPadding = 0.08;
};

struct VariantReport {
  std::string name;
  std::vector<MetricReport> rows;  // one per sequence, corpus order
  MetricReport mean;
};

/// Side-by-side corpus evaluation of the full pipeline, the
/// rectification-off ablation, and the ground-truth-hands oracle. The two
/// hand-predicting variants share the same stage-1 samples, so they differ
/// only by rectification.
struct CorpusEvaluation {
  VariantReport rectified;
  VariantReport unrectified;
  VariantReport gtHands;
  double baselineHandJpe = 0.0;  // constant training-mean hand predictor, cm
  double bestOfHandJpe = 0.0;    // best-of-s stage-1 hand error, cm
  std::vector<std::string> sequenceNames;
  std::string table;  // aggregate comparison, Table-style columns
};

/// Mean hand position over every frame of the given records (6 coordinates).
Vector6d meanTrainingHands(const std::vector<DatasetRecord>& records);

/// Mean wrist position error between two hand trajectories, centimeters.
double handTrajectoryError(const MatrixXd& predHands, const MatrixXd& gtHands);

/// Runs every test record through the three variants with `bestOf`
/// end-to-end samples each, selecting per variant the sample with the
/// smallest MPJPE. Deterministic in (models, records, options.seed) and
/// independent of the worker count.
CorpusEvaluation evaluateCorpus(const Stage1Model& stage1, const Stage2Model& stage2,
                                const std::vector<DatasetRecord>& testRecords,
                                const Vector6d& trainMeanHands, const EvalOptions& options = {});

}  // namespace msynth
