#include "msynth/cli/cli.hpp"

#include "msynth/cli/config.hpp"
#include "msynth/parallel.hpp"
#include "msynth/pipeline/checkpoint.hpp"
#include "msynth/pipeline/motion_io.hpp"
#include "msynth/pipeline/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace msynth {

namespace {

namespace fs = std::filesystem;

// Output directories are user-named. Only the final component may be new;
// a missing parent is an I/O error, matching corpus generation.
void prepareOutputDir(const fs::path& dir) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw IoError("output path is not a directory: " + dir.string());
    return;
  }
  const fs::path parent = dir.parent_path();
  if (!parent.empty() && !fs::exists(parent)) {
    throw IoError("missing parent directory for output: " + parent.string());
  }
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
}

std::ofstream openText(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

int cmdGenData(const RunConfig& cfg, const fs::path& output, std::ostream& out) {
  const CorpusManifest manifest = buildCorpus(cfg.corpusConfig(output));
  saveRunConfig(cfg, output / "config.json");
  int subjectTest = 0;
  int objectTest = 0;
  for (const ManifestEntry& entry : manifest.entries) {
    if (entry.subjectSplit == "test") ++subjectTest;
    if (entry.objectSplit == "test") ++objectTest;
  }
  out << "corpus " << output.string() << "\n";
  out << "sequences " << manifest.entries.size() << "\n";
  out << "subject_test " << subjectTest << "\n";
  out << "object_test " << objectTest << "\n";
  out << "corpus_hash " << manifest.corpusHash << "\n";
  return 0;
}

int cmdTrain(const RunConfig& cfg, int stage, const fs::path& corpusRoot, const fs::path& output,
             const fs::path& resume, std::ostream& out) {
  const Skeleton skeleton = cfg.skeleton();
  const CorpusManifest manifest = loadManifest(corpusRoot);
  const std::vector<DatasetRecord> records =
      loadSplit(corpusRoot, manifest, skeleton, "subject", "train");
  if (records.empty()) throw ConfigError("training split is empty");

  prepareOutputDir(output);
  const TrainOptions opts = cfg.trainOptions();
  std::ofstream lossLog = openText(output / "loss_log.txt");

  std::vector<TrainLogEntry> entries;
  fs::path ckptPath;
  if (stage == 1) {
    Stage1Model model = resume.empty()
                            ? Stage1Model::create(cfg.encoderConfig(), cfg.stage1Denoiser(),
                                                  cfg.scheduleConfig(), cfg.stage1Seed)
                            : loadStage1Checkpoint(resume);
    std::vector<HandTrainingSequence> data(records.size());
    parallelFor(
        records.size(),
        [&](std::size_t i) {
          data[i].rawFeatures = rawObjectFeatures(records[i].objectSequence(), model.basis);
          data[i].hands = records[i].gtHands;
        },
        opts.workers);
    entries = trainStage1(model, data, skeleton, opts, &lossLog);
    ckptPath = output / "stage1.ckpt";
    saveStage1Checkpoint(model, ckptPath);
  } else {
    Stage2Model model = resume.empty()
                            ? Stage2Model::create(skeleton, cfg.stage2Denoiser(),
                                                  cfg.scheduleConfig(), cfg.stage2Seed)
                            : loadStage2Checkpoint(resume);
    std::vector<BodyTrainingSequence> data(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      data[i].poseFlat = flattenPose(skeleton, records[i].poses);
      data[i].hands = records[i].gtHands;
    }
    // The basis seed pins the same basis stage 1 trains against, so the
    // compatibility stamp matches without needing stage 1's checkpoint.
    const BpsBasis basis = makeBpsBasis(cfg.nBps, cfg.bpsSeed, cfg.bpsRadius);
    entries = trainStage2(model, data, basis, opts, &lossLog);
    ckptPath = output / "stage2.ckpt";
    saveStage2Checkpoint(model, ckptPath);
  }

  saveRunConfig(cfg, output / "config.json");
  out << "stage " << stage << "\n";
  out << "sequences " << records.size() << "\n";
  out << "steps " << opts.steps << "\n";
  if (!entries.empty()) {
    out << std::setprecision(17);
    out << "first step " << entries.front().step << " loss " << entries.front().loss << "\n";
    out << "final step " << entries.back().step << " loss " << entries.back().loss << "\n";
  }
  out << "loss_log " << (output / "loss_log.txt").string() << "\n";
  out << "checkpoint " << ckptPath.string() << "\n";
  return 0;
}

int cmdPipeline(const RunConfig& cfg, const fs::path& trajectoryPath, const fs::path& meshPath,
                const fs::path& stage1Path, const fs::path& stage2Path, const fs::path& output,
                std::uint64_t seed, bool noRectify, std::ostream& out) {
  ObjectSequence seq;
  seq.mesh = loadObj(meshPath);
  const Trajectory trajectory = loadTrajectory(trajectoryPath);
  seq.transforms = trajectory.transforms;
  seq.fps = trajectory.fps;
  seq.validate();

  const Stage1Model stage1 = loadStage1Checkpoint(stage1Path);
  const Stage2Model stage2 = loadStage2Checkpoint(stage2Path);

  PipelineOptions options;
  options.rectify = !noRectify;
  options.contactThreshold = cfg.rectifyThreshold;
  const PipelineResult result = runPipeline(stage1, stage2, seq, seed, options);

  prepareOutputDir(output);
  MotionData motion;
  motion.poseFlat = flattenPose(stage2.skeleton, result.body);
  motion.hands = result.hands;
  motion.anchors = result.anchors;
  motion.fps = seq.fps;
  saveMotion(motion, output / "motion.txt");
  saveRunConfig(cfg, output / "config.json");

  out << "frames " << result.body.frameCount() << "\n";
  out << "hand_mode " << handModeName(result.handMode) << "\n";
  out << "anchors " << result.anchors.size() << "\n";
  for (const ContactAnchor& anchor : result.anchors) {
    out << "anchor " << (anchor.hand == Hand::Left ? "left" : "right") << " frame "
        << anchor.startFrame << " vertex " << anchor.vertexIndex << "\n";
  }
  out << "motion " << (output / "motion.txt").string() << "\n";
  return 0;
}

int cmdEvaluate(const RunConfig& cfg, const fs::path& corpusRoot, const fs::path& stage1Path,
                const fs::path& stage2Path, const fs::path& output, const std::string& scheme,
                std::ostream& out) {
  const Skeleton skeleton = cfg.skeleton();
  const CorpusManifest manifest = loadManifest(corpusRoot);
  const std::vector<DatasetRecord> trainRecords =
      loadSplit(corpusRoot, manifest, skeleton, scheme, "train");
  const std::vector<DatasetRecord> testRecords =
      loadSplit(corpusRoot, manifest, skeleton, scheme, "test");
  if (trainRecords.empty()) throw ConfigError("training split is empty, no baseline to compare");
  if (testRecords.empty()) throw ConfigError("test split is empty");

  const Stage1Model stage1 = loadStage1Checkpoint(stage1Path);
  const Stage2Model stage2 = loadStage2Checkpoint(stage2Path);
  const Vector6d meanHands = meanTrainingHands(trainRecords);
  const CorpusEvaluation eval =
      evaluateCorpus(stage1, stage2, testRecords, meanHands, cfg.evalOptions());

  prepareOutputDir(output);
  std::ofstream report = openText(output / "report.txt");
  report << "msynth-report v1\n";
  report << "scheme " << scheme << "\n";
  report << "sequences " << testRecords.size() << "\n";
  report << "best_of " << cfg.bestOf << "\n";
  report << std::setprecision(17);
  report << "baseline_hand_jpe " << eval.baselineHandJpe << "\n";
  report << "best_of_hand_jpe " << eval.bestOfHandJpe << "\n";
  report << "\n" << eval.table << "\n";
  for (const VariantReport* variant : {&eval.rectified, &eval.unrectified, &eval.gtHands}) {
    report << variant->name << "\n";
    report << formatReportTable(eval.sequenceNames, variant->rows, variant->mean) << "\n";
  }
  saveRunConfig(cfg, output / "config.json");

  out << eval.table;
  out << std::setprecision(17);
  out << "baseline_hand_jpe " << eval.baselineHandJpe << "\n";
  out << "best_of_hand_jpe " << eval.bestOfHandJpe << "\n";
  out << "report " << (output / "report.txt").string() << "\n";
  return 0;
}

}  // namespace

int runCli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"desk-scale object-conditioned human motion synthesis"};
  app.name("msynth");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic desk-manipulation corpus");
  std::string genConfig;
  std::string genOutput;
  std::uint64_t genSeed = 0;
  int genSubjects = 0;
  int genPerSubject = 0;
  int genHeldOut = 0;
  long long genFrames = 0;
  int genWorkers = 0;
  gen->add_option("--config", genConfig, "config document (JSON)");
  gen->add_option("--output", genOutput, "corpus output directory")->required();
  gen->add_option("--seed", genSeed, "corpus seed override");
  gen->add_option("--subjects", genSubjects, "subject count override");
  gen->add_option("--sequences-per-subject", genPerSubject, "sequences per subject override");
  gen->add_option("--held-out-subjects", genHeldOut, "held-out subject count override");
  gen->add_option("--frames", genFrames, "frames per sequence override");
  gen->add_option("--workers", genWorkers, "worker thread override");

  auto* train = app.add_subcommand("train", "train one diffusion stage on a corpus");
  std::string trainConfig;
  std::string trainCorpus;
  std::string trainOutput;
  std::string trainResume;
  int trainStage = 0;
  int trainSteps = 0;
  int trainBatch = 0;
  double trainLr = 0.0;
  int trainLogEvery = 0;
  std::uint64_t trainSeed = 0;
  int trainWorkers = 0;
  train->add_option("--stage", trainStage, "1 = hand trajectories, 2 = full body")
      ->required()
      ->check(CLI::Range(1, 2));
  train->add_option("--corpus", trainCorpus, "corpus root (from gen-data)")->required();
  train->add_option("--output", trainOutput, "checkpoint + loss log directory")->required();
  train->add_option("--config", trainConfig, "config document (JSON)");
  train->add_option("--resume", trainResume, "checkpoint to continue from");
  train->add_option("--steps", trainSteps, "optimizer step count override");
  train->add_option("--batch", trainBatch, "batch size override");
  train->add_option("--lr", trainLr, "learning rate override");
  train->add_option("--log-every", trainLogEvery, "loss log interval override");
  train->add_option("--seed", trainSeed, "seed override for the selected stage");
  train->add_option("--workers", trainWorkers, "worker thread override");

  auto* pipe =
      app.add_subcommand("pipeline", "synthesize full-body motion for an object trajectory");
  std::string pipeConfig;
  std::string pipeTrajectory;
  std::string pipeMesh;
  std::string pipeStage1;
  std::string pipeStage2;
  std::string pipeOutput;
  std::uint64_t pipeSeed = 0;
  bool noRectify = false;
  pipe->add_option("--object-trajectory", pipeTrajectory, "object trajectory file")->required();
  pipe->add_option("--mesh", pipeMesh, "object mesh (OBJ)")->required();
  pipe->add_option("--stage1", pipeStage1, "stage-1 checkpoint")->required();
  pipe->add_option("--stage2", pipeStage2, "stage-2 checkpoint")->required();
  pipe->add_option("--output", pipeOutput, "motion output directory")->required();
  pipe->add_option("--seed", pipeSeed, "sampling seed");
  pipe->add_flag("--no-rectify", noRectify, "skip contact rectification");
  pipe->add_option("--config", pipeConfig, "config document (JSON)");

  auto* ev = app.add_subcommand("evaluate", "run the pipeline over a held-out split and report");
  std::string evConfig;
  std::string evCorpus;
  std::string evStage1;
  std::string evStage2;
  std::string evOutput;
  std::string evScheme = "subject";
  int evBestOf = 0;
  std::uint64_t evSeed = 0;
  int evWorkers = 0;
  ev->add_option("--corpus", evCorpus, "corpus root (from gen-data)")->required();
  ev->add_option("--stage1", evStage1, "stage-1 checkpoint")->required();
  ev->add_option("--stage2", evStage2, "stage-2 checkpoint")->required();
  ev->add_option("--output", evOutput, "report output directory")->required();
  ev->add_option("--split", evScheme, "held-out scheme: subject | object");
  ev->add_option("--best-of", evBestOf, "samples per sequence, best MPJPE kept");
  ev->add_option("--seed", evSeed, "evaluation seed override");
  ev->add_option("--workers", evWorkers, "worker thread override");
  ev->add_option("--config", evConfig, "config document (JSON)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (app.got_subcommand(gen)) {
      RunConfig cfg = genConfig.empty() ? RunConfig{} : loadRunConfig(genConfig);
      if (gen->count("--seed")) cfg.dataSeed = genSeed;
      if (gen->count("--subjects")) cfg.subjects = genSubjects;
      if (gen->count("--sequences-per-subject")) cfg.sequencesPerSubject = genPerSubject;
      if (gen->count("--held-out-subjects")) cfg.heldOutSubjects = genHeldOut;
      if (gen->count("--frames")) cfg.frames = static_cast<Eigen::Index>(genFrames);
      if (gen->count("--workers")) cfg.workers = genWorkers;
      cfg.validate();
      return cmdGenData(cfg, genOutput, out);
    }
    if (app.got_subcommand(train)) {
      RunConfig cfg = trainConfig.empty() ? RunConfig{} : loadRunConfig(trainConfig);
      if (train->count("--steps")) cfg.trainSteps = trainSteps;
      if (train->count("--batch")) cfg.batchSize = trainBatch;
      if (train->count("--lr")) cfg.learningRate = trainLr;
      if (train->count("--log-every")) cfg.logEvery = trainLogEvery;
      if (train->count("--seed")) (trainStage == 1 ? cfg.stage1Seed : cfg.stage2Seed) = trainSeed;
      if (train->count("--workers")) cfg.workers = trainWorkers;
      cfg.validate();
      return cmdTrain(cfg, trainStage, trainCorpus, trainOutput, trainResume, out);
    }
    if (app.got_subcommand(pipe)) {
      RunConfig cfg = pipeConfig.empty() ? RunConfig{} : loadRunConfig(pipeConfig);
      cfg.validate();
      return cmdPipeline(cfg, pipeTrajectory, pipeMesh, pipeStage1, pipeStage2, pipeOutput,
                         pipeSeed, noRectify, out);
    }
    if (app.got_subcommand(ev)) {
      RunConfig cfg = evConfig.empty() ? RunConfig{} : loadRunConfig(evConfig);
      if (ev->count("--best-of")) cfg.bestOf = evBestOf;
      if (ev->count("--seed")) cfg.evalSeed = evSeed;
      if (ev->count("--workers")) cfg.workers = evWorkers;
      cfg.validate();
      return cmdEvaluate(cfg, evCorpus, evStage1, evStage2, evOutput, evScheme, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return 3;
  } catch (const TrainingDiverged& e) {
    err << "training diverged: " << e.what() << "\n";
    return 4;
  } catch (const CheckpointMismatch& e) {
    err << "checkpoint mismatch: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace msynth
