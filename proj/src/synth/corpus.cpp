#include "msynth/synth/corpus.hpp"

#include "msynth/hash.hpp"
#include "msynth/parallel.hpp"
#include "msynth/pipeline/motion_io.hpp"

#include <json.hpp>

#include <fstream>
#include <mutex>
#include <sstream>

namespace msynth {

namespace {

using nlohmann::json;

HandMode parseHandModeName(const std::string& name) {
  if (name == "none") return HandMode::None;
  if (name == "one_handed(left)") return HandMode::LeftOnly;
  if (name == "one_handed(right)") return HandMode::RightOnly;
  if (name == "two_handed") return HandMode::TwoHanded;
  throw ConfigError("unknown hand mode: " + name);
}

std::string sequenceDirName(int index, int total) {
  int width = 3;
  for (int v = total - 1; v >= 1000; v /= 10) ++width;
  std::ostringstream out;
  out << "seq_";
  const std::string digits = std::to_string(index);
  for (int i = static_cast<int>(digits.size()); i < width; ++i) out << '0';
  out << digits;
  return out.str();
}

void writeTextFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

CorpusConfig::CorpusConfig() : skeleton(stickFigure9()) {}

void CorpusConfig::validate() const {
  if (root.empty()) throw ConfigError("CorpusConfig: root path is empty");
  if (subjects < 1 || sequencesPerSubject < 1) throw ConfigError("CorpusConfig: corpus is empty");
  if (heldOutSubjects < 0 || heldOutSubjects >= subjects) {
    throw ConfigError("CorpusConfig: held-out subjects out of range");
  }
  if (frames < 2) throw ConfigError("CorpusConfig: need at least 2 frames");
  if (!(fps > 0.0)) throw ConfigError("CorpusConfig: fps must be positive");
  skeleton.validate();
}

ScenarioSpec corpusScenario(const CorpusConfig& config, int index) {
  if (index < 0 || index >= config.sequenceCount()) throw ConfigError("corpusScenario: bad index");
  const int subject = index / config.sequencesPerSubject;
  const int i = index % config.sequencesPerSubject;
  ScenarioSpec spec;
  const int fam = i % 5;
  spec.object = fam < 2 ? ObjectFamily::Box : fam < 4 ? ObjectFamily::Cylinder : ObjectFamily::Lamp;
  switch (i % 4) {
    case 0: spec.motion = MotionFamily::Lift; break;
    case 1: spec.motion = MotionFamily::Drag; break;
    case 2: spec.motion = MotionFamily::Push; break;
    default: spec.motion = MotionFamily::Rotate; break;
  }
  switch (spec.object) {
    case ObjectFamily::Box:
      spec.handMode = HandMode::TwoHanded;
      break;
    case ObjectFamily::Cylinder:
      spec.handMode = i % 2 == 0 ? HandMode::TwoHanded : HandMode::LeftOnly;
      break;
    case ObjectFamily::Lamp:
      spec.handMode = (subject + i / 5) % 2 == 0 ? HandMode::RightOnly : HandMode::LeftOnly;
      break;
  }
  spec.subject = subject;
  spec.frames = config.frames;
  spec.fps = config.fps;
  spec.seed = mixSeed(config.seed, static_cast<std::uint64_t>(index));
  return spec;
}

void saveContactLabels(const Eigen::MatrixXi& labels, const std::filesystem::path& path) {
  if (labels.cols() != 2) throw ConfigError("saveContactLabels: expected two columns");
  std::ostringstream out;
  out << "msynth-labels v1\n";
  out << "frames " << labels.rows() << "\n";
  for (Eigen::Index t = 0; t < labels.rows(); ++t) {
    out << t << " " << labels(t, 0) << " " << labels(t, 1) << "\n";
  }
  writeTextFile(path, out.str());
}

Eigen::MatrixXi loadContactLabels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open labels file: " + path.string());
  std::string word, version;
  in >> word >> version;
  if (!in || word != "msynth-labels" || version != "v1") {
    throw IoError("bad labels header: " + path.string());
  }
  Eigen::Index frames = 0;
  in >> word >> frames;
  if (!in || word != "frames" || frames < 0) throw IoError("bad labels frame count: " + path.string());
  Eigen::MatrixXi labels(frames, 2);
  for (Eigen::Index t = 0; t < frames; ++t) {
    Eigen::Index idx = -1;
    int l = 0, r = 0;
    in >> idx >> l >> r;
    if (!in || idx != t || (l != 0 && l != 1) || (r != 0 && r != 1)) {
      throw IoError("bad labels record: " + path.string());
    }
    labels(t, 0) = l;
    labels(t, 1) = r;
  }
  std::string tail;
  if (in >> tail) throw IoError("trailing data in labels file: " + path.string());
  return labels;
}

std::string hashFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return hashString(buf.str());
}

CorpusManifest buildCorpus(const CorpusConfig& config) {
  config.validate();
  const std::filesystem::path parent = config.root.parent_path();
  if (!parent.empty() && !std::filesystem::exists(parent)) {
    throw IoError("buildCorpus: parent directory does not exist: " + parent.string());
  }
  std::filesystem::create_directories(config.root);

  const int n = config.sequenceCount();
  std::vector<DatasetRecord> records(static_cast<std::size_t>(n));
  std::exception_ptr failure;
  std::mutex failureMutex;
  parallelFor(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        try {
          const ScenarioSpec spec = corpusScenario(config, static_cast<int>(i));
          Rng rng = makeRng(spec.seed);
          DatasetRecord rec = generateScenario(spec, config.skeleton, rng);
          rec.id = sequenceDirName(static_cast<int>(i), n);
          rec.subjectSplit =
              spec.subject >= config.subjects - config.heldOutSubjects ? "test" : "train";
          rec.objectSplit = spec.object == ObjectFamily::Lamp ? "test" : "train";
          records[i] = std::move(rec);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failureMutex);
          if (!failure) failure = std::current_exception();
        }
      },
      config.workers);
  if (failure) std::rethrow_exception(failure);

  CorpusManifest manifest;
  manifest.seed = config.seed;
  manifest.subjects = config.subjects;
  manifest.sequencesPerSubject = config.sequencesPerSubject;
  manifest.heldOutSubjects = config.heldOutSubjects;
  manifest.frames = config.frames;
  manifest.fps = config.fps;
  manifest.entries.reserve(static_cast<std::size_t>(n));

  Fnv1a corpusHash;
  for (const DatasetRecord& rec : records) {
    const std::filesystem::path dir = config.root / rec.id;
    std::filesystem::create_directories(dir);
    saveObj(rec.mesh, dir / "mesh.obj");
    saveTrajectory(rec.trajectory, dir / "object.traj");
    MotionData motion;
    motion.poseFlat = flattenPose(config.skeleton, rec.poses);
    motion.hands = rec.gtHands;
    motion.fps = rec.poses.fps;
    saveMotion(motion, dir / "motion.txt");
    saveContactLabels(rec.contactLabels, dir / "labels.txt");

    ManifestEntry entry;
    entry.dir = rec.id;
    entry.subject = rec.subject;
    entry.objectFamily = objectFamilyName(rec.objectFamily);
    entry.motionFamily = motionFamilyName(rec.motionFamily);
    entry.handMode = handModeName(rec.handMode);
    entry.subjectSplit = rec.subjectSplit;
    entry.objectSplit = rec.objectSplit;
    entry.seed = rec.seed;
    entry.meshHash = hashFile(dir / "mesh.obj");
    entry.trajectoryHash = hashFile(dir / "object.traj");
    entry.motionHash = hashFile(dir / "motion.txt");
    entry.labelsHash = hashFile(dir / "labels.txt");

    json meta;
    meta["id"] = rec.id;
    meta["subject"] = rec.subject;
    meta["object_family"] = entry.objectFamily;
    meta["motion_family"] = entry.motionFamily;
    meta["hand_mode"] = entry.handMode;
    meta["seed"] = rec.seed;
    meta["split_subject"] = rec.subjectSplit;
    meta["split_object"] = rec.objectSplit;
    meta["frames"] = rec.poses.frameCount();
    meta["fps"] = rec.poses.fps;
    writeTextFile(dir / "meta.json", meta.dump(2) + "\n");

    corpusHash.update(entry.dir);
    corpusHash.update(entry.meshHash);
    corpusHash.update(entry.trajectoryHash);
    corpusHash.update(entry.motionHash);
    corpusHash.update(entry.labelsHash);
    manifest.entries.push_back(std::move(entry));
  }
  manifest.corpusHash = corpusHash.hex();

  json doc;
  doc["version"] = manifest.version;
  doc["seed"] = manifest.seed;
  doc["subjects"] = manifest.subjects;
  doc["sequences_per_subject"] = manifest.sequencesPerSubject;
  doc["held_out_subjects"] = manifest.heldOutSubjects;
  doc["frames"] = manifest.frames;
  doc["fps"] = manifest.fps;
  doc["corpus_hash"] = manifest.corpusHash;
  json entries = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    json je;
    je["dir"] = e.dir;
    je["subject"] = e.subject;
    je["object_family"] = e.objectFamily;
    je["motion_family"] = e.motionFamily;
    je["hand_mode"] = e.handMode;
    je["split_subject"] = e.subjectSplit;
    je["split_object"] = e.objectSplit;
    je["seed"] = e.seed;
    je["hash_mesh"] = e.meshHash;
    je["hash_trajectory"] = e.trajectoryHash;
    je["hash_motion"] = e.motionHash;
    je["hash_labels"] = e.labelsHash;
    entries.push_back(std::move(je));
  }
  doc["entries"] = std::move(entries);
  writeTextFile(config.root / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

CorpusManifest loadManifest(const std::filesystem::path& root) {
  std::ifstream in(root / "manifest.json", std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + (root / "manifest.json").string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }
  CorpusManifest manifest;
  try {
    manifest.version = doc.at("version").get<int>();
    if (manifest.version != 1) throw IoError("unsupported manifest version");
    manifest.seed = doc.at("seed").get<std::uint64_t>();
    manifest.subjects = doc.at("subjects").get<int>();
    manifest.sequencesPerSubject = doc.at("sequences_per_subject").get<int>();
    manifest.heldOutSubjects = doc.at("held_out_subjects").get<int>();
    manifest.frames = doc.at("frames").get<Eigen::Index>();
    manifest.fps = doc.at("fps").get<double>();
    manifest.corpusHash = doc.at("corpus_hash").get<std::string>();
    for (const json& je : doc.at("entries")) {
      ManifestEntry e;
      e.dir = je.at("dir").get<std::string>();
      e.subject = je.at("subject").get<int>();
      e.objectFamily = je.at("object_family").get<std::string>();
      e.motionFamily = je.at("motion_family").get<std::string>();
      e.handMode = je.at("hand_mode").get<std::string>();
      e.subjectSplit = je.at("split_subject").get<std::string>();
      e.objectSplit = je.at("split_object").get<std::string>();
      e.seed = je.at("seed").get<std::uint64_t>();
      e.meshHash = je.at("hash_mesh").get<std::string>();
      e.trajectoryHash = je.at("hash_trajectory").get<std::string>();
      e.motionHash = je.at("hash_motion").get<std::string>();
      e.labelsHash = je.at("hash_labels").get<std::string>();
      manifest.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw IoError("manifest missing fields: " + std::string(e.what()));
  }
  return manifest;
}

DatasetRecord loadRecord(const std::filesystem::path& root, const ManifestEntry& entry,
                         const Skeleton& skeleton, bool verifyHashes) {
  const std::filesystem::path dir = root / entry.dir;
  if (verifyHashes) {
    const std::pair<const char*, const std::string*> files[] = {
        {"mesh.obj", &entry.meshHash},
        {"object.traj", &entry.trajectoryHash},
        {"motion.txt", &entry.motionHash},
        {"labels.txt", &entry.labelsHash},
    };
    for (const auto& [name, expected] : files) {
      const std::string actual = hashFile(dir / name);
      if (actual != *expected) {
        throw IoError("corpus file hash mismatch for " + (dir / name).string());
      }
    }
  }
  DatasetRecord rec;
  rec.id = entry.dir;
  rec.subject = entry.subject;
  rec.objectFamily = parseObjectFamily(entry.objectFamily);
  rec.motionFamily = parseMotionFamily(entry.motionFamily);
  rec.handMode = parseHandModeName(entry.handMode);
  rec.seed = entry.seed;
  rec.subjectSplit = entry.subjectSplit;
  rec.objectSplit = entry.objectSplit;
  rec.mesh = loadObj(dir / "mesh.obj");
  rec.trajectory = loadTrajectory(dir / "object.traj");
  const MotionData motion = loadMotion(dir / "motion.txt");
  rec.poses = unflattenPose(skeleton, motion.poseFlat, motion.fps);
  rec.gtHands = motion.hands;
  rec.contactLabels = loadContactLabels(dir / "labels.txt");
  if (rec.contactLabels.rows() != rec.poses.frameCount() ||
      rec.poses.frameCount() != static_cast<Eigen::Index>(rec.trajectory.transforms.size())) {
    throw IoError("corpus record has inconsistent frame counts: " + dir.string());
  }
  return rec;
}

std::vector<DatasetRecord> loadSplit(const std::filesystem::path& root,
                                     const CorpusManifest& manifest, const Skeleton& skeleton,
                                     const std::string& scheme, const std::string& split) {
  if (scheme != "subject" && scheme != "object") throw ConfigError("loadSplit: unknown scheme " + scheme);
  if (split != "train" && split != "test") throw ConfigError("loadSplit: unknown split " + split);
  std::vector<DatasetRecord> out;
  for (const ManifestEntry& entry : manifest.entries) {
    const std::string& tag = scheme == "subject" ? entry.subjectSplit : entry.objectSplit;
    if (tag == split) out.push_back(loadRecord(root, entry, skeleton));
  }
  return out;
}

}  // namespace msynth
