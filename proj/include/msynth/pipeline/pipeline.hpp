#pragma once

#include "msynth/pipeline/contact.hpp"
#include "msynth/pipeline/stages.hpp"

namespace msynth {

struct PipelineOptions {
  bool rectify = true;
  double contactThreshold = 0.03;  // meters
};

struct PipelineResult {
  MatrixXd rawHands;  // stage-1 sample, frames x 6
  MatrixXd hands;     // after rectification (equal to rawHands when skipped)
  std::vector<ContactAnchor> anchors;
  HandMode handMode = HandMode::None;
  PoseSequence body;
};

/// Full synthesis chain: encode the object, sample a hand trajectory,
/// rectify contacts, sample the body conditioned on the result. All
/// intermediates are kept for inspection. Deterministic given (sequence,
/// checkpoints, seed); throws CheckpointMismatch when the two stages were
/// not trained against the same data contract.
PipelineResult runPipeline(const Stage1Model& stage1, const Stage2Model& stage2,
                           const ObjectSequence& seq, std::uint64_t seed,
                           const PipelineOptions& options = {});

}  // namespace msynth
