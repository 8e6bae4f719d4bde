#include "msynth/pipeline/pipeline.hpp"

namespace msynth {

PipelineResult runPipeline(const Stage1Model& stage1, const Stage2Model& stage2,
                           const ObjectSequence& seq, std::uint64_t seed,
                           const PipelineOptions& options) {
  seq.validate();
  if (stage1.compatHash != stage2.compatHash) {
    throw CheckpointMismatch("stage checkpoints disagree on (basis, skeleton, normalization): '" +
                             stage1.compatHash + "' vs '" + stage2.compatHash + "'");
  }
  if (!(options.contactThreshold > 0.0)) {
    throw ConfigError("runPipeline: contact threshold must be positive");
  }

  PipelineResult result;
  const MatrixXd raw = rawObjectFeatures(seq, stage1.basis);
  Rng handRng = makeStream(seed, 101);
  result.rawHands = sampleHands(stage1, raw, handRng);

  if (options.rectify) {
    RectifyResult rectified = rectifyContacts(result.rawHands, seq, options.contactThreshold);
    result.hands = std::move(rectified.hands);
    result.anchors = std::move(rectified.anchors);
  } else {
    result.hands = result.rawHands;
  }
  result.handMode = inferHandMode(result.hands, seq, options.contactThreshold);

  Rng bodyRng = makeStream(seed, 202);
  result.body = sampleBody(stage2, result.hands, seq.fps, bodyRng);
  return result;
}

}  // namespace msynth
