#pragma once

#include "msynth/diffusion/diffusion.hpp"
#include "msynth/kin/pose_sequence.hpp"
#include "msynth/pipeline/object_encoder.hpp"

#include <iosfwd>
#include <optional>

namespace msynth {

struct ScheduleConfig {
  int steps = 1000;
  std::string family = "cosine";  // "linear" | "cosine"
  double betaStart = 1e-4;        // linear only
  double betaEnd = 0.02;          // linear only
  double cosineOffset = 0.008;    // cosine only
  bool posteriorVariance = false;

  NoiseSchedule build() const;  // throws ConfigError on unknown family
};

/// Content hash tying a checkpoint to its data contract: the BPS basis, the
/// skeleton, and the hand normalization that stage 1 emits and stage 2
/// consumes. Two checkpoints may only be run as a pipeline when equal.
std::string compatibilityHash(const BpsBasis& basis, const Skeleton& skeleton,
                              const Normalization& handNorm);

struct TrainOptions {
  int steps = 2000;
  int batchSize = 16;
  AdamConfig adam;      // lr defaults to 2e-4
  int logEvery = 50;    // loss log cadence, steps
  int workers = 0;      // 0 -> hardware concurrency
};

struct TrainLogEntry {
  int step = 0;  // 1-based optimizer step index
  double loss = 0.0;
};

/// Hand-trajectory generator conditioned on object geometry features. The
/// BPS projector and the denoiser share one store and train jointly.
struct Stage1Model {
  ObjectEncoderConfig encoderCfg;
  DenoiserConfig denoiserCfg;  // dX = 6, dCond = encoderCfg.dObj
  ScheduleConfig scheduleCfg;

  BpsBasis basis;
  ParamStore store;
  ObjectEncoder encoder;
  TransformerDenoiser denoiser;
  NoiseSchedule schedule;
  Normalization handNorm;  // fitted on training wrist tracks
  Normalization featNorm;  // fitted on training raw object features
  AdamState adam;
  Rng rng;  // owns every training-time draw; serialized into checkpoints
  std::string compatHash;

  static Stage1Model create(const ObjectEncoderConfig& encoderCfg, DenoiserConfig denoiserCfg,
                            const ScheduleConfig& scheduleCfg, std::uint64_t seed);
};

/// Full-body pose generator conditioned on a hand trajectory.
struct Stage2Model {
  DenoiserConfig denoiserCfg;  // dX = poseDim(skeleton), dCond = 6
  ScheduleConfig scheduleCfg;

  Skeleton skeleton;
  ParamStore store;
  TransformerDenoiser denoiser;
  NoiseSchedule schedule;
  Normalization poseNorm;  // fitted on training flattened poses
  Normalization handNorm;  // fitted on training wrist tracks (the condition)
  AdamState adam;
  Rng rng;
  std::string compatHash;

  static Stage2Model create(const Skeleton& skeleton, DenoiserConfig denoiserCfg,
                            const ScheduleConfig& scheduleCfg, std::uint64_t seed);
};

/// One training sequence for stage 1: precomputed raw object features and
/// the ground-truth wrist track, both frames-major.
struct HandTrainingSequence {
  MatrixXd rawFeatures;  // frames x (3 + 3 n_bps)
  MatrixXd hands;        // frames x 6
};

/// One training sequence for stage 2: flattened poses plus the wrist track
/// extracted from them (human motion only; no object data).
struct BodyTrainingSequence {
  MatrixXd poseFlat;  // frames x poseDim
  MatrixXd hands;     // frames x 6
};

/// Runs `opts.steps` optimizer steps, resuming from the model's current
/// Adam/RNG state. On the first step ever the normalizations are fitted and
/// the compatibility hash is stamped (the skeleton is only needed for that
/// stamp). Appends "step <n> loss <value>" lines to `log` every
/// opts.logEvery steps. Returns the logged entries.
std::vector<TrainLogEntry> trainStage1(Stage1Model& model,
                                       const std::vector<HandTrainingSequence>& data,
                                       const Skeleton& skeleton, const TrainOptions& opts,
                                       std::ostream* log = nullptr);

/// Same contract for stage 2; the BPS basis is only needed for the
/// compatibility stamp.
std::vector<TrainLogEntry> trainStage2(Stage2Model& model,
                                       const std::vector<BodyTrainingSequence>& data,
                                       const BpsBasis& basis, const TrainOptions& opts,
                                       std::ostream* log = nullptr);

/// One conditional sample of a denormalized frames x 6 hand trajectory.
MatrixXd sampleHands(const Stage1Model& model, const MatrixXd& rawFeatures, Rng& rng);

/// One conditional sample of a full-body sequence given (typically
/// rectified) hand positions.
PoseSequence sampleBody(const Stage2Model& model, const MatrixXd& hands, double fps, Rng& rng);

}  // namespace msynth
