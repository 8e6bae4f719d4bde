#pragma once

#include "msynth/pipeline/stages.hpp"

#include <filesystem>

namespace msynth {

/// Checkpoint container, one file per stage:
///   8-byte magic "MSYNCKP1"
///   u64 header length
///   JSON header: format/version/stage, model configs, compat hash,
///     Adam step, serialized training RNG, and a blob directory
///   blob section: col-major float64 payloads in directory order
///     (parameter values, Adam moments, normalization stats, BPS basis or
///     skeleton geometry)
/// Loading restores training state exactly: resuming produces the same
/// losses as an uninterrupted run. Corrupt or truncated files raise
/// IoError; a well-formed file of the wrong stage, version, or shape
/// raises CheckpointMismatch.
void saveStage1Checkpoint(const Stage1Model& model, const std::filesystem::path& path);
Stage1Model loadStage1Checkpoint(const std::filesystem::path& path);

void saveStage2Checkpoint(const Stage2Model& model, const std::filesystem::path& path);
Stage2Model loadStage2Checkpoint(const std::filesystem::path& path);

}  // namespace msynth
