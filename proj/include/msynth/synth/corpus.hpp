#pragma once

#include "msynth/synth/scenario.hpp"

#include <filesystem>
#include <vector>

namespace msynth {

/// Synthetic corpus layout and sizing. The default configuration yields
/// 12 subjects x 20 sequences = 240 records: 200 train / 40 test under the
/// subject-held-out scheme, and all lamp sequences held out under the
/// object-family scheme.
struct CorpusConfig {
  std::filesystem::path root;
  int subjects = 12;
  int sequencesPerSubject = 20;
  int heldOutSubjects = 2;
  Eigen::Index frames = 30;
  double fps = 30.0;
  std::uint64_t seed = 7;
  int workers = 0;
  Skeleton skeleton;

  CorpusConfig();
  void validate() const;
  int sequenceCount() const { return subjects * sequencesPerSubject; }
};

struct ManifestEntry {
  std::string dir;
  int subject = 0;
  std::string objectFamily;
  std::string motionFamily;
  std::string handMode;
  std::string subjectSplit;
  std::string objectSplit;
  std::uint64_t seed = 0;
  std::string meshHash;
  std::string trajectoryHash;
  std::string motionHash;
  std::string labelsHash;
};

struct CorpusManifest {
  int version = 1;
  std::uint64_t seed = 0;
  int subjects = 0;
  int sequencesPerSubject = 0;
  int heldOutSubjects = 0;
  Eigen::Index frames = 0;
  double fps = 30.0;
  std::vector<ManifestEntry> entries;
  std::string corpusHash;  // digest over the per-file hashes, in order
};

/// Deterministic scenario parameters for record `index` of the corpus:
/// object/motion family rotation, hand mode, subject, and per-record seed.
ScenarioSpec corpusScenario(const CorpusConfig& config, int index);

/// Generates every record, writes one directory per sequence (mesh.obj,
/// object.traj, motion.txt, labels.txt, meta.json) plus manifest.json at the
/// root, and returns the manifest. Throws IoError when the parent of `root`
/// does not exist.
CorpusManifest buildCorpus(const CorpusConfig& config);

CorpusManifest loadManifest(const std::filesystem::path& root);

/// Reads one sequence directory back into a DatasetRecord, verifying the
/// manifest file hashes unless `verifyHashes` is false. The skeleton must
/// match the one the corpus was generated with (pose width is checked).
DatasetRecord loadRecord(const std::filesystem::path& root, const ManifestEntry& entry,
                         const Skeleton& skeleton, bool verifyHashes = true);

/// `scheme` is "subject" or "object"; `split` is "train" or "test".
std::vector<DatasetRecord> loadSplit(const std::filesystem::path& root,
                                     const CorpusManifest& manifest, const Skeleton& skeleton,
                                     const std::string& scheme, const std::string& split);

void saveContactLabels(const Eigen::MatrixXi& labels, const std::filesystem::path& path);
Eigen::MatrixXi loadContactLabels(const std::filesystem::path& path);

std::string hashFile(const std::filesystem::path& path);

}  // namespace msynth
