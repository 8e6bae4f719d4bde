#include "msynth/cli/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace msynth {

namespace {

using nlohmann::json;

// Pulls one typed value out of a section, leaving the field untouched when
// the key is absent.
template <typename T>
void readField(const json& section, const std::string& key, T& field) {
  if (!section.contains(key)) return;
  try {
    field = section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

void readIndex(const json& section, const std::string& key, Eigen::Index& field) {
  long long value = static_cast<long long>(field);
  readField(section, key, value);
  field = static_cast<Eigen::Index>(value);
}

void rejectUnknownKeys(const json& section, const std::string& name,
                       const std::set<std::string>& known) {
  for (auto it = section.begin(); it != section.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown config key '" + name + "." + it.key() + "'");
    }
  }
}

const json& sectionOrEmpty(const json& doc, const std::string& name) {
  static const json empty = json::object();
  if (!doc.contains(name)) return empty;
  const json& section = doc.at(name);
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  return section;
}

}  // namespace

void RunConfig::validate() const {
  if (skeletonName != "stick9" && skeletonName != "humanoid24") {
    throw ConfigError("unknown skeleton '" + skeletonName + "'");
  }
  encoderConfig().validate();
  stage1Denoiser().validate();
  stage2Denoiser().validate();
  scheduleConfig().build();  // validates the family and step count
  if (learningRate <= 0.0) throw ConfigError("learning rate must be positive");
  if (batchSize < 1) throw ConfigError("batch size must be at least 1");
  if (trainSteps < 1) throw ConfigError("training step count must be at least 1");
  if (logEvery < 1) throw ConfigError("log interval must be at least 1");
  if (workers < 0) throw ConfigError("worker count must be non-negative");
  if (subjects < 1 || sequencesPerSubject < 1) {
    throw ConfigError("corpus must have at least one subject and one sequence each");
  }
  if (heldOutSubjects < 0 || heldOutSubjects >= subjects) {
    throw ConfigError("held-out subjects must be in [0, subjects)");
  }
  if (frames < 2) throw ConfigError("sequences need at least 2 frames");
  if (!(fps > 0.0)) throw ConfigError("fps must be positive");
  if (!(rectifyThreshold > 0.0) || !(contactThreshold > 0.0) || !(collisionThreshold > 0.0)) {
    throw ConfigError("all thresholds must be positive");
  }
  if (bestOf < 1) throw ConfigError("best-of must be at least 1");
  if (sdfResolution < 2) throw ConfigError("sdf resolution must be at least 2");
  if (sdfPadding < 0.0) throw ConfigError("sdf padding must be non-negative");
}

Skeleton RunConfig::skeleton() const {
  if (skeletonName == "stick9") return stickFigure9();
  if (skeletonName == "humanoid24") return humanoid24();
  throw ConfigError("unknown skeleton '" + skeletonName + "'");
}

ObjectEncoderConfig RunConfig::encoderConfig() const {
  ObjectEncoderConfig cfg;
  cfg.nBps = nBps;
  cfg.radius = bpsRadius;
  cfg.seed = bpsSeed;
  cfg.dObj = dObj;
  return cfg;
}

DenoiserConfig RunConfig::stage1Denoiser() const {
  DenoiserConfig cfg;
  cfg.dX = 6;
  cfg.dCond = dObj;
  cfg.dModel = dModel;
  cfg.dQkv = dQkv;
  cfg.heads = heads;
  cfg.blocks = blocks;
  return cfg;
}

DenoiserConfig RunConfig::stage2Denoiser() const {
  DenoiserConfig cfg;
  cfg.dX = poseDim(skeleton());
  cfg.dCond = 6;
  cfg.dModel = dModel;
  cfg.dQkv = dQkv;
  cfg.heads = heads;
  cfg.blocks = blocks;
  return cfg;
}

ScheduleConfig RunConfig::scheduleConfig() const {
  ScheduleConfig cfg;
  cfg.steps = scheduleSteps;
  cfg.family = scheduleFamily;
  cfg.betaStart = betaStart;
  cfg.betaEnd = betaEnd;
  cfg.posteriorVariance = posteriorVariance;
  return cfg;
}

TrainOptions RunConfig::trainOptions() const {
  TrainOptions opts;
  opts.steps = trainSteps;
  opts.batchSize = batchSize;
  opts.adam.lr = learningRate;
  opts.logEvery = logEvery;
  opts.workers = workers;
  return opts;
}

CorpusConfig RunConfig::corpusConfig(const std::filesystem::path& root) const {
  CorpusConfig cfg;
  cfg.root = root;
  cfg.subjects = subjects;
  cfg.sequencesPerSubject = sequencesPerSubject;
  cfg.heldOutSubjects = heldOutSubjects;
  cfg.frames = frames;
  cfg.fps = fps;
  cfg.seed = dataSeed;
  cfg.workers = workers;
  cfg.skeleton = skeleton();
  return cfg;
}

EvalOptions RunConfig::evalOptions() const {
  EvalOptions opts;
  opts.bestOf = bestOf;
  opts.seed = evalSeed;
  opts.workers = workers;
  opts.contactThreshold = contactThreshold;
  opts.collisionThreshold = collisionThreshold;
  opts.rectifyThreshold = rectifyThreshold;
  opts.sdfResolution = sdfResolution;
  opts.sdfPadding = sdfPadding;
  return opts;
}

RunConfig loadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  rejectUnknownKeys(doc, "config",
                    {"version", "skeleton", "bps", "model", "schedule", "training", "data",
                     "thresholds", "eval"});
  int version = 1;
  readField(doc, "version", version);
  if (version != 1) throw ConfigError("unsupported config version");

  RunConfig cfg;
  readField(doc, "skeleton", cfg.skeletonName);

  const json& bps = sectionOrEmpty(doc, "bps");
  rejectUnknownKeys(bps, "bps", {"points", "radius", "seed", "feature_width"});
  readIndex(bps, "points", cfg.nBps);
  readField(bps, "radius", cfg.bpsRadius);
  readField(bps, "seed", cfg.bpsSeed);
  readIndex(bps, "feature_width", cfg.dObj);

  const json& model = sectionOrEmpty(doc, "model");
  rejectUnknownKeys(model, "model", {"d_model", "d_qkv", "heads", "blocks"});
  readIndex(model, "d_model", cfg.dModel);
  readIndex(model, "d_qkv", cfg.dQkv);
  readField(model, "heads", cfg.heads);
  readField(model, "blocks", cfg.blocks);

  const json& schedule = sectionOrEmpty(doc, "schedule");
  rejectUnknownKeys(schedule, "schedule",
                    {"steps", "family", "beta_start", "beta_end", "posterior_variance"});
  readField(schedule, "steps", cfg.scheduleSteps);
  readField(schedule, "family", cfg.scheduleFamily);
  readField(schedule, "beta_start", cfg.betaStart);
  readField(schedule, "beta_end", cfg.betaEnd);
  readField(schedule, "posterior_variance", cfg.posteriorVariance);

  const json& training = sectionOrEmpty(doc, "training");
  rejectUnknownKeys(training, "training",
                    {"learning_rate", "batch_size", "steps", "log_every", "stage1_seed",
                     "stage2_seed", "workers"});
  readField(training, "learning_rate", cfg.learningRate);
  readField(training, "batch_size", cfg.batchSize);
  readField(training, "steps", cfg.trainSteps);
  readField(training, "log_every", cfg.logEvery);
  readField(training, "stage1_seed", cfg.stage1Seed);
  readField(training, "stage2_seed", cfg.stage2Seed);
  readField(training, "workers", cfg.workers);

  const json& data = sectionOrEmpty(doc, "data");
  rejectUnknownKeys(data, "data",
                    {"subjects", "sequences_per_subject", "held_out_subjects", "frames", "fps",
                     "seed"});
  readField(data, "subjects", cfg.subjects);
  readField(data, "sequences_per_subject", cfg.sequencesPerSubject);
  readField(data, "held_out_subjects", cfg.heldOutSubjects);
  readIndex(data, "frames", cfg.frames);
  readField(data, "fps", cfg.fps);
  readField(data, "seed", cfg.dataSeed);

  const json& thresholds = sectionOrEmpty(doc, "thresholds");
  rejectUnknownKeys(thresholds, "thresholds", {"contact_rectify", "contact_metric", "collision"});
  readField(thresholds, "contact_rectify", cfg.rectifyThreshold);
  readField(thresholds, "contact_metric", cfg.contactThreshold);
  readField(thresholds, "collision", cfg.collisionThreshold);

  const json& eval = sectionOrEmpty(doc, "eval");
  rejectUnknownKeys(eval, "eval", {"best_of", "seed", "sdf_resolution", "sdf_padding"});
  readField(eval, "best_of", cfg.bestOf);
  readField(eval, "seed", cfg.evalSeed);
  readField(eval, "sdf_resolution", cfg.sdfResolution);
  readField(eval, "sdf_padding", cfg.sdfPadding);

  cfg.validate();
  return cfg;
}

void saveRunConfig(const RunConfig& config, const std::filesystem::path& path) {
  json doc;
  doc["version"] = 1;
  doc["skeleton"] = config.skeletonName;
  doc["bps"] = {{"points", static_cast<long long>(config.nBps)},
                {"radius", config.bpsRadius},
                {"seed", config.bpsSeed},
                {"feature_width", static_cast<long long>(config.dObj)}};
  doc["model"] = {{"d_model", static_cast<long long>(config.dModel)},
                  {"d_qkv", static_cast<long long>(config.dQkv)},
                  {"heads", config.heads},
                  {"blocks", config.blocks}};
  doc["schedule"] = {{"steps", config.scheduleSteps},
                     {"family", config.scheduleFamily},
                     {"beta_start", config.betaStart},
                     {"beta_end", config.betaEnd},
                     {"posterior_variance", config.posteriorVariance}};
  doc["training"] = {{"learning_rate", config.learningRate},
                     {"batch_size", config.batchSize},
                     {"steps", config.trainSteps},
                     {"log_every", config.logEvery},
                     {"stage1_seed", config.stage1Seed},
                     {"stage2_seed", config.stage2Seed},
                     {"workers", config.workers}};
  doc["data"] = {{"subjects", config.subjects},
                 {"sequences_per_subject", config.sequencesPerSubject},
                 {"held_out_subjects", config.heldOutSubjects},
                 {"frames", static_cast<long long>(config.frames)},
                 {"fps", config.fps},
                 {"seed", config.dataSeed}};
  doc["thresholds"] = {{"contact_rectify", config.rectifyThreshold},
                       {"contact_metric", config.contactThreshold},
                       {"collision", config.collisionThreshold}};
  doc["eval"] = {{"best_of", config.bestOf},
                 {"seed", config.evalSeed},
                 {"sdf_resolution", config.sdfResolution},
                 {"sdf_padding", config.sdfPadding}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config: " + path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace msynth
