#include "msynth/pipeline/stages.hpp"

#include <cmath>

#include "msynth/hash.hpp"

#include <ostream>
#include <sstream>

namespace msynth {

NoiseSchedule ScheduleConfig::build() const {
  NoiseSchedule schedule;
  if (family == "linear") {
    schedule = linearSchedule(steps, betaStart, betaEnd);
  } else if (family == "cosine") {
    schedule = cosineSchedule(steps, cosineOffset);
  } else {
    throw ConfigError("ScheduleConfig: unknown family '" + family + "'");
  }
  schedule.posteriorVariance = posteriorVariance;
  return schedule;
}

namespace {

void hashMatrix(Fnv1a& h, const MatrixXd& m) {
  h.update(static_cast<std::int64_t>(m.rows()));
  h.update(static_cast<std::int64_t>(m.cols()));
  h.update(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

void hashVector(Fnv1a& h, const VectorXd& v) {
  h.update(static_cast<std::int64_t>(v.size()));
  h.update(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

std::string formatLoss(int step, double loss) {
  std::ostringstream line;
  line.precision(17);
  line << "step " << step << " loss " << loss;
  return line.str();
}

}  // namespace

std::string compatibilityHash(const BpsBasis& basis, const Skeleton& skeleton,
                              const Normalization& handNorm) {
  Fnv1a h;
  hashMatrix(h, basis.points);
  h.update(basis.radius);
  h.update(static_cast<std::int64_t>(basis.seed));

  h.update(static_cast<std::int64_t>(skeleton.jointCount()));
  for (const std::string& name : skeleton.jointNames) h.update(name);
  for (const int p : skeleton.parents) h.update(static_cast<std::int64_t>(p));
  hashMatrix(h, skeleton.offsets);
  for (const int j : skeleton.rotatedJoints) h.update(static_cast<std::int64_t>(j));
  h.update(static_cast<std::int64_t>(skeleton.leftWrist));
  h.update(static_cast<std::int64_t>(skeleton.rightWrist));
  for (const int j : skeleton.footJoints) h.update(static_cast<std::int64_t>(j));
  hashVector(h, skeleton.capsuleRadii);
  h.update(static_cast<std::int64_t>(skeleton.proxyRings));
  h.update(static_cast<std::int64_t>(skeleton.proxySegments));

  hashVector(h, handNorm.mean);
  hashVector(h, handNorm.std);
  return h.hex();
}

Stage1Model Stage1Model::create(const ObjectEncoderConfig& encoderCfg, DenoiserConfig denoiserCfg,
                                const ScheduleConfig& scheduleCfg, std::uint64_t seed) {
  encoderCfg.validate();
  denoiserCfg.dX = 6;
  denoiserCfg.dCond = encoderCfg.dObj;
  denoiserCfg.validate();

  Stage1Model model;
  model.encoderCfg = encoderCfg;
  model.denoiserCfg = denoiserCfg;
  model.scheduleCfg = scheduleCfg;
  model.basis = makeBpsBasis(encoderCfg.nBps, encoderCfg.seed, encoderCfg.radius);

  Rng init = makeStream(seed, 1);
  model.encoder = ObjectEncoder(model.store, "obj", encoderCfg, init);
  model.denoiser = TransformerDenoiser(model.store, "den", denoiserCfg, init);
  model.schedule = scheduleCfg.build();
  model.handNorm = Normalization::identity(6);
  model.featNorm = Normalization::identity(encoderCfg.rawDim());
  model.rng = makeStream(seed, 2);
  return model;
}

Stage2Model Stage2Model::create(const Skeleton& skeleton, DenoiserConfig denoiserCfg,
                                const ScheduleConfig& scheduleCfg, std::uint64_t seed) {
  skeleton.validate();
  denoiserCfg.dX = poseDim(skeleton);
  denoiserCfg.dCond = 6;
  denoiserCfg.validate();

  Stage2Model model;
  model.denoiserCfg = denoiserCfg;
  model.scheduleCfg = scheduleCfg;
  model.skeleton = skeleton;

  Rng init = makeStream(seed, 1);
  model.denoiser = TransformerDenoiser(model.store, "den", denoiserCfg, init);
  model.schedule = scheduleCfg.build();
  model.poseNorm = Normalization::identity(poseDim(skeleton));
  model.handNorm = Normalization::identity(6);
  model.rng = makeStream(seed, 2);
  return model;
}

namespace {

void checkPair(const MatrixXd& a, Eigen::Index aCols, const MatrixXd& b, Eigen::Index bCols,
               const char* what) {
  if (a.cols() != aCols || b.cols() != bCols || a.rows() != b.rows() || a.rows() < 1) {
    throw ConfigError(std::string("training data shape mismatch in ") + what);
  }
}

}  // namespace

std::vector<TrainLogEntry> trainStage1(Stage1Model& model,
                                       const std::vector<HandTrainingSequence>& data,
                                       const Skeleton& skeleton, const TrainOptions& opts,
                                       std::ostream* log) {
  if (data.empty()) throw ConfigError("trainStage1: no training sequences");
  if (opts.steps < 1 || opts.batchSize < 1 || opts.logEvery < 1) {
    throw ConfigError("trainStage1: steps, batchSize and logEvery must be positive");
  }
  for (const HandTrainingSequence& seq : data) {
    checkPair(seq.rawFeatures, model.encoderCfg.rawDim(), seq.hands, 6, "stage 1");
  }

  if (model.adam.step == 0) {
    std::vector<MatrixXd> hands, feats;
    hands.reserve(data.size());
    feats.reserve(data.size());
    for (const HandTrainingSequence& seq : data) {
      hands.push_back(seq.hands);
      feats.push_back(seq.rawFeatures);
    }
    model.handNorm = Normalization::fit(hands);
    model.featNorm = Normalization::fit(feats);
    model.compatHash = compatibilityHash(model.basis, skeleton, model.handNorm);
  }

  std::vector<MatrixXd> feats(data.size()), targets(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    feats[i] = model.featNorm.apply(data[i].rawFeatures);
    targets[i] = model.handNorm.apply(data[i].hands);
  }

  std::vector<TrainLogEntry> entries;
  for (int s = 0; s < opts.steps; ++s) {
    std::vector<DiffusionBatchItem> batch(static_cast<std::size_t>(opts.batchSize));
    for (DiffusionBatchItem& item : batch) {
      const auto idx = static_cast<std::size_t>(
          uniformInt(model.rng, 0, static_cast<std::int64_t>(data.size()) - 1));
      item.x0 = targets[idx];
      item.condition = [&encoder = model.encoder, feat = &feats[idx]](
                           const std::vector<VarPtr>& leaves) {
        return encoder.project(leaves, constant(*feat));
      };
    }
    const double loss = diffusionTrainStep(model.denoiser, model.store, model.schedule, batch,
                                           model.rng, opts.adam, model.adam, opts.workers);
    const int stepId = static_cast<int>(model.adam.step);
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("stage 1 loss is not finite at " + formatLoss(stepId, loss));
    }
    if (stepId % opts.logEvery == 0 || s == 0 || s + 1 == opts.steps) {
      entries.push_back({stepId, loss});
      if (log) *log << formatLoss(stepId, loss) << '\n';
    }
  }
  return entries;
}

std::vector<TrainLogEntry> trainStage2(Stage2Model& model,
                                       const std::vector<BodyTrainingSequence>& data,
                                       const BpsBasis& basis, const TrainOptions& opts,
                                       std::ostream* log) {
  if (data.empty()) throw ConfigError("trainStage2: no training sequences");
  if (opts.steps < 1 || opts.batchSize < 1 || opts.logEvery < 1) {
    throw ConfigError("trainStage2: steps, batchSize and logEvery must be positive");
  }
  const Eigen::Index dim = poseDim(model.skeleton);
  for (const BodyTrainingSequence& seq : data) {
    checkPair(seq.poseFlat, dim, seq.hands, 6, "stage 2");
  }

  if (model.adam.step == 0) {
    std::vector<MatrixXd> poses, hands;
    poses.reserve(data.size());
    hands.reserve(data.size());
    for (const BodyTrainingSequence& seq : data) {
      poses.push_back(seq.poseFlat);
      hands.push_back(seq.hands);
    }
    model.poseNorm = Normalization::fit(poses);
    model.handNorm = Normalization::fit(hands);
    model.compatHash = compatibilityHash(basis, model.skeleton, model.handNorm);
  }

  std::vector<MatrixXd> conds(data.size()), targets(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    conds[i] = model.handNorm.apply(data[i].hands);
    targets[i] = model.poseNorm.apply(data[i].poseFlat);
  }

  std::vector<TrainLogEntry> entries;
  for (int s = 0; s < opts.steps; ++s) {
    std::vector<DiffusionBatchItem> batch(static_cast<std::size_t>(opts.batchSize));
    for (DiffusionBatchItem& item : batch) {
      const auto idx = static_cast<std::size_t>(
          uniformInt(model.rng, 0, static_cast<std::int64_t>(data.size()) - 1));
      item.x0 = targets[idx];
      item.condition = [cond = &conds[idx]](const std::vector<VarPtr>&) {
        return constant(*cond);
      };
    }
    const double loss = diffusionTrainStep(model.denoiser, model.store, model.schedule, batch,
                                           model.rng, opts.adam, model.adam, opts.workers);
    const int stepId = static_cast<int>(model.adam.step);
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("stage 2 loss is not finite at " + formatLoss(stepId, loss));
    }
    if (stepId % opts.logEvery == 0 || s == 0 || s + 1 == opts.steps) {
      entries.push_back({stepId, loss});
      if (log) *log << formatLoss(stepId, loss) << '\n';
    }
  }
  return entries;
}

MatrixXd sampleHands(const Stage1Model& model, const MatrixXd& rawFeatures, Rng& rng) {
  if (rawFeatures.cols() != model.encoderCfg.rawDim() || rawFeatures.rows() < 1) {
    throw ConfigError("sampleHands: raw feature shape does not match the encoder config");
  }
  const MatrixXd cond = model.encoder.projectValue(model.store, model.featNorm.apply(rawFeatures));
  const DenoiseFn denoise = [&](const MatrixXd& xNoisy, int n) {
    return model.denoiser.forwardValue(model.store, xNoisy, cond, n);
  };
  const MatrixXd sample = diffusionSample(denoise, model.schedule, rawFeatures.rows(), 6, rng);
  return model.handNorm.invert(sample);
}

PoseSequence sampleBody(const Stage2Model& model, const MatrixXd& hands, double fps, Rng& rng) {
  if (hands.cols() != 6 || hands.rows() < 1) {
    throw ConfigError("sampleBody: hand trajectory must be frames x 6");
  }
  const MatrixXd cond = model.handNorm.apply(hands);
  const DenoiseFn denoise = [&](const MatrixXd& xNoisy, int n) {
    return model.denoiser.forwardValue(model.store, xNoisy, cond, n);
  };
  const MatrixXd sample =
      diffusionSample(denoise, model.schedule, hands.rows(), poseDim(model.skeleton), rng);
  return unflattenPose(model.skeleton, model.poseNorm.invert(sample), fps);
}

}  // namespace msynth
