#include "msynth/pipeline/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <vector>

namespace msynth {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'M', 'S', 'Y', 'N', 'C', 'K', 'P', '1'};

json denoiserJson(const DenoiserConfig& cfg) {
  return {{"d_x", cfg.dX},         {"d_cond", cfg.dCond}, {"d_model", cfg.dModel},
          {"d_qkv", cfg.dQkv},     {"heads", cfg.heads},  {"blocks", cfg.blocks},
          {"positional_encoding", cfg.positionalEncoding}};
}

DenoiserConfig denoiserFromJson(const json& j) {
  DenoiserConfig cfg;
  cfg.dX = j.at("d_x").get<Eigen::Index>();
  cfg.dCond = j.at("d_cond").get<Eigen::Index>();
  cfg.dModel = j.at("d_model").get<Eigen::Index>();
  cfg.dQkv = j.at("d_qkv").get<Eigen::Index>();
  cfg.heads = j.at("heads").get<int>();
  cfg.blocks = j.at("blocks").get<int>();
  cfg.positionalEncoding = j.at("positional_encoding").get<bool>();
  return cfg;
}

json scheduleJson(const ScheduleConfig& cfg) {
  return {{"steps", cfg.steps},
          {"family", cfg.family},
          {"beta_start", cfg.betaStart},
          {"beta_end", cfg.betaEnd},
          {"cosine_offset", cfg.cosineOffset},
          {"posterior_variance", cfg.posteriorVariance}};
}

ScheduleConfig scheduleFromJson(const json& j) {
  ScheduleConfig cfg;
  cfg.steps = j.at("steps").get<int>();
  cfg.family = j.at("family").get<std::string>();
  cfg.betaStart = j.at("beta_start").get<double>();
  cfg.betaEnd = j.at("beta_end").get<double>();
  cfg.cosineOffset = j.at("cosine_offset").get<double>();
  cfg.posteriorVariance = j.at("posterior_variance").get<bool>();
  return cfg;
}

json skeletonJson(const Skeleton& skel) {
  return {{"names", skel.jointNames},
          {"parents", skel.parents},
          {"rotated", skel.rotatedJoints},
          {"left_wrist", skel.leftWrist},
          {"right_wrist", skel.rightWrist},
          {"feet", skel.footJoints},
          {"proxy_rings", skel.proxyRings},
          {"proxy_segments", skel.proxySegments}};
}

// Blob payloads queued for the binary section, in directory order.
struct BlobWriter {
  json directory = json::array();
  std::vector<MatrixXd> payloads;

  void add(const std::string& name, const MatrixXd& m) {
    directory.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    payloads.push_back(m);
  }
  void add(const std::string& name, const VectorXd& v) { add(name, MatrixXd(v)); }
};

void writeFile(const std::filesystem::path& path, const json& header, const BlobWriter& blobs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  const std::string head = header.dump();
  const std::uint64_t headLen = head.size();
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&headLen), sizeof(headLen));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const MatrixXd& m : blobs.payloads) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  }
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

struct LoadedCheckpoint {
  json header;
  std::vector<std::string> names;
  std::vector<MatrixXd> blobs;

  const MatrixXd& blob(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return blobs[i];
    }
    throw CheckpointMismatch("checkpoint is missing blob '" + name + "'");
  }
  VectorXd blobVector(const std::string& name) const {
    const MatrixXd& m = blob(name);
    if (m.cols() != 1) throw CheckpointMismatch("blob '" + name + "' is not a vector");
    return m.col(0);
  }
};

LoadedCheckpoint readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a checkpoint file: " + path.string());
  }
  std::uint64_t headLen = 0;
  in.read(reinterpret_cast<char*>(&headLen), sizeof(headLen));
  if (!in || headLen == 0 || headLen > (1ull << 30)) {
    throw IoError("corrupt checkpoint header: " + path.string());
  }
  std::string head(headLen, '\0');
  in.read(head.data(), static_cast<std::streamsize>(headLen));
  if (!in) throw IoError("truncated checkpoint header: " + path.string());

  LoadedCheckpoint loaded;
  try {
    loaded.header = json::parse(head);
  } catch (const json::exception& e) {
    throw IoError("unparseable checkpoint header: " + std::string(e.what()));
  }
  if (loaded.header.value("format", "") != "msynth-checkpoint") {
    throw IoError("wrong container format: " + path.string());
  }
  if (loaded.header.value("version", 0) != 1) {
    throw CheckpointMismatch("unsupported checkpoint version in " + path.string());
  }

  try {
    for (const json& entry : loaded.header.at("blobs")) {
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      if (rows < 0 || cols < 0) throw IoError("negative blob shape: " + path.string());
      MatrixXd m(rows, cols);
      in.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
      if (!in) throw IoError("truncated checkpoint payload: " + path.string());
      loaded.names.push_back(entry.at("name").get<std::string>());
      loaded.blobs.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed blob directory: " + std::string(e.what()));
  }
  return loaded;
}

json commonHeader(int stage, const std::string& compatHash, const DenoiserConfig& denoiser,
                  const ScheduleConfig& schedule, const AdamState& adam, const Rng& rng) {
  return {{"format", "msynth-checkpoint"},
          {"version", 1},
          {"stage", stage},
          {"compat_hash", compatHash},
          {"denoiser", denoiserJson(denoiser)},
          {"schedule", scheduleJson(schedule)},
          {"adam_step", adam.step},
          {"rng", serializeRng(rng)}};
}

void addStoreBlobs(BlobWriter& blobs, const ParamStore& store) {
  for (const Parameter& p : store.all()) blobs.add("param:" + p.name, p.value);
  for (const Parameter& p : store.all()) blobs.add("adam_m:" + p.name, p.m);
  for (const Parameter& p : store.all()) blobs.add("adam_v:" + p.name, p.v);
}

void restoreStore(ParamStore& store, const LoadedCheckpoint& loaded) {
  for (Parameter& p : store.all()) {
    const MatrixXd& value = loaded.blob("param:" + p.name);
    const MatrixXd& m = loaded.blob("adam_m:" + p.name);
    const MatrixXd& v = loaded.blob("adam_v:" + p.name);
    if (value.rows() != p.value.rows() || value.cols() != p.value.cols()) {
      throw CheckpointMismatch("parameter '" + p.name + "' has mismatched shape");
    }
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols() || v.rows() != p.value.rows() ||
        v.cols() != p.value.cols()) {
      throw CheckpointMismatch("Adam moments of '" + p.name + "' have mismatched shape");
    }
    p.value = value;
    p.m = m;
    p.v = v;
  }
}

Normalization normFromBlobs(const LoadedCheckpoint& loaded, const std::string& which) {
  Normalization norm;
  norm.mean = loaded.blobVector("norm:" + which + ".mean");
  norm.std = loaded.blobVector("norm:" + which + ".std");
  if (norm.mean.size() != norm.std.size()) {
    throw CheckpointMismatch("normalization '" + which + "' stats disagree in length");
  }
  return norm;
}

}  // namespace

void saveStage1Checkpoint(const Stage1Model& model, const std::filesystem::path& path) {
  json header = commonHeader(1, model.compatHash, model.denoiserCfg, model.scheduleCfg,
                             model.adam, model.rng);
  header["encoder"] = {{"n_bps", model.encoderCfg.nBps},
                       {"radius", model.encoderCfg.radius},
                       {"seed", model.encoderCfg.seed},
                       {"d_obj", model.encoderCfg.dObj},
                       {"hidden", model.encoderCfg.hidden}};

  BlobWriter blobs;
  blobs.add("basis:points", MatrixXd(model.basis.points));
  blobs.add("norm:hand.mean", model.handNorm.mean);
  blobs.add("norm:hand.std", model.handNorm.std);
  blobs.add("norm:feat.mean", model.featNorm.mean);
  blobs.add("norm:feat.std", model.featNorm.std);
  addStoreBlobs(blobs, model.store);
  header["blobs"] = blobs.directory;
  writeFile(path, header, blobs);
}

Stage1Model loadStage1Checkpoint(const std::filesystem::path& path) {
  const LoadedCheckpoint loaded = readFile(path);
  if (loaded.header.value("stage", 0) != 1) {
    throw CheckpointMismatch("expected a stage-1 checkpoint: " + path.string());
  }

  ObjectEncoderConfig encoderCfg;
  try {
    const json& enc = loaded.header.at("encoder");
    encoderCfg.nBps = enc.at("n_bps").get<Eigen::Index>();
    encoderCfg.radius = enc.at("radius").get<double>();
    encoderCfg.seed = enc.at("seed").get<std::uint64_t>();
    encoderCfg.dObj = enc.at("d_obj").get<Eigen::Index>();
    encoderCfg.hidden = enc.at("hidden").get<Eigen::Index>();
  } catch (const json::exception& e) {
    throw IoError("malformed stage-1 header: " + std::string(e.what()));
  }

  Stage1Model model = Stage1Model::create(encoderCfg,
                                          denoiserFromJson(loaded.header.at("denoiser")),
                                          scheduleFromJson(loaded.header.at("schedule")), 0);
  const MatrixXd& basisPoints = loaded.blob("basis:points");
  if (basisPoints.rows() != 3 || basisPoints.cols() != encoderCfg.nBps) {
    throw CheckpointMismatch("BPS basis blob shape disagrees with the encoder config");
  }
  model.basis.points = basisPoints;
  model.handNorm = normFromBlobs(loaded, "hand");
  model.featNorm = normFromBlobs(loaded, "feat");
  restoreStore(model.store, loaded);
  model.adam.step = loaded.header.at("adam_step").get<std::int64_t>();
  model.rng = deserializeRng(loaded.header.at("rng").get<std::string>());
  model.compatHash = loaded.header.at("compat_hash").get<std::string>();
  return model;
}

void saveStage2Checkpoint(const Stage2Model& model, const std::filesystem::path& path) {
  json header = commonHeader(2, model.compatHash, model.denoiserCfg, model.scheduleCfg,
                             model.adam, model.rng);
  header["skeleton"] = skeletonJson(model.skeleton);

  BlobWriter blobs;
  blobs.add("skeleton:offsets", MatrixXd(model.skeleton.offsets));
  blobs.add("skeleton:radii", model.skeleton.capsuleRadii);
  blobs.add("norm:pose.mean", model.poseNorm.mean);
  blobs.add("norm:pose.std", model.poseNorm.std);
  blobs.add("norm:hand.mean", model.handNorm.mean);
  blobs.add("norm:hand.std", model.handNorm.std);
  addStoreBlobs(blobs, model.store);
  header["blobs"] = blobs.directory;
  writeFile(path, header, blobs);
}

Stage2Model loadStage2Checkpoint(const std::filesystem::path& path) {
  const LoadedCheckpoint loaded = readFile(path);
  if (loaded.header.value("stage", 0) != 2) {
    throw CheckpointMismatch("expected a stage-2 checkpoint: " + path.string());
  }

  Skeleton skeleton;
  try {
    const json& sk = loaded.header.at("skeleton");
    skeleton.jointNames = sk.at("names").get<std::vector<std::string>>();
    skeleton.parents = sk.at("parents").get<std::vector<int>>();
    skeleton.rotatedJoints = sk.at("rotated").get<std::vector<int>>();
    skeleton.leftWrist = sk.at("left_wrist").get<int>();
    skeleton.rightWrist = sk.at("right_wrist").get<int>();
    skeleton.footJoints = sk.at("feet").get<std::vector<int>>();
    skeleton.proxyRings = sk.at("proxy_rings").get<int>();
    skeleton.proxySegments = sk.at("proxy_segments").get<int>();
  } catch (const json::exception& e) {
    throw IoError("malformed stage-2 header: " + std::string(e.what()));
  }
  const MatrixXd& offsets = loaded.blob("skeleton:offsets");
  if (offsets.rows() != 3 || offsets.cols() != static_cast<Eigen::Index>(skeleton.parents.size())) {
    throw CheckpointMismatch("skeleton offset blob shape disagrees with the joint list");
  }
  skeleton.offsets = offsets;
  skeleton.capsuleRadii = loaded.blobVector("skeleton:radii");

  Stage2Model model = Stage2Model::create(skeleton,
                                          denoiserFromJson(loaded.header.at("denoiser")),
                                          scheduleFromJson(loaded.header.at("schedule")), 0);
  model.poseNorm = normFromBlobs(loaded, "pose");
  model.handNorm = normFromBlobs(loaded, "hand");
  restoreStore(model.store, loaded);
  model.adam.step = loaded.header.at("adam_step").get<std::int64_t>();
  model.rng = deserializeRng(loaded.header.at("rng").get<std::string>());
  model.compatHash = loaded.header.at("compat_hash").get<std::string>();
  return model;
}

}  // namespace msynth
