#pragma once

#include "msynth/eval/harness.hpp"
#include "msynth/pipeline/stages.hpp"
#include "msynth/synth/corpus.hpp"

#include <filesystem>
#include <string>

namespace msynth {

/// Every knob the command-line tool exposes, with desk-scale defaults.
/// Persisted as a versioned JSON document; unknown keys are rejected so a
/// typo fails loudly instead of silently falling back to a default.
struct RunConfig {
  std::string skeletonName = "stick9";  // "stick9" | "humanoid24"

  // object encoder: BPS basis plus the learned projection width
  Eigen::Index nBps = 64;
  double bpsRadius = 1.0;
  std::uint64_t bpsSeed = 2024;
  Eigen::Index dObj = 64;

  // denoiser dims, shared by both stages
  Eigen::Index dModel = 64;
  Eigen::Index dQkv = 32;
  int heads = 4;
  int blocks = 4;

  // noise schedule
  int scheduleSteps = 50;
  std::string scheduleFamily = "linear";
  double betaStart = 1e-4;
  double betaEnd = 0.02;
  bool posteriorVariance = false;

  // training
  double learningRate = 2e-4;
  int batchSize = 16;
  int trainSteps = 2000;
  int logEvery = 50;
  std::uint64_t stage1Seed = 11;
  std::uint64_t stage2Seed = 12;
  int workers = 0;  // 0 -> hardware concurrency

  // synthetic corpus
  int subjects = 12;
  int sequencesPerSubject = 20;
  int heldOutSubjects = 2;
  Eigen::Index frames = 30;
  double fps = 30.0;
  std::uint64_t dataSeed = 7;

  // thresholds, meters
  double rectifyThreshold = 0.03;
  double contactThreshold = 0.05;
  double collisionThreshold = 0.04;

  // evaluation
  int bestOf = 20;
  std::uint64_t evalSeed = 2025;
  int sdfResolution = 32;
  double sdfPadding = 0.08;

  void validate() const;  // throws ConfigError

  // Views into the aggregate for the libraries underneath.
  Skeleton skeleton() const;
  ObjectEncoderConfig encoderConfig() const;
  DenoiserConfig stage1Denoiser() const;
  DenoiserConfig stage2Denoiser() const;
  ScheduleConfig scheduleConfig() const;
  TrainOptions trainOptions() const;
  CorpusConfig corpusConfig(const std::filesystem::path& root) const;
  EvalOptions evalOptions() const;
};

/// Reads a config document. Missing file raises IoError; malformed JSON,
/// wrong version, unknown keys, or bad value types raise ConfigError.
RunConfig loadRunConfig(const std::filesystem::path& path);

/// Writes the full document (every field, defaults included), so the echoed
/// copy in an output directory always reproduces the run.
void saveRunConfig(const RunConfig& config, const std::filesystem::path& path);

}  // namespace msynth
