#include "msynth/pipeline/motion_io.hpp"

#include <fstream>

namespace msynth {

void saveMotion(const MotionData& motion, const std::filesystem::path& path) {
  if (motion.poseFlat.rows() < 1 || motion.poseFlat.cols() < 3 ||
      (motion.poseFlat.cols() - 3) % 6 != 0) {
    throw ConfigError("saveMotion: pose matrix is not a flattened pose layout");
  }
  if (motion.hands.rows() != motion.poseFlat.rows() || motion.hands.cols() != 6) {
    throw ConfigError("saveMotion: hand matrix must be frames x 6");
  }
  if (!(motion.fps > 0.0)) throw ConfigError("saveMotion: fps must be positive");

  std::ofstream out(path);
  if (!out) throw IoError("saveMotion: cannot open " + path.string());
  out.precision(17);
  out << "msynth-motion v1\n";
  out << "fps " << motion.fps << '\n';
  out << "rotated " << (motion.poseFlat.cols() - 3) / 6 << '\n';
  out << "frames " << motion.poseFlat.rows() << '\n';
  for (Eigen::Index t = 0; t < motion.poseFlat.rows(); ++t) {
    out << t;
    for (Eigen::Index c = 0; c < motion.poseFlat.cols(); ++c) out << ' ' << motion.poseFlat(t, c);
    for (Eigen::Index c = 0; c < 6; ++c) out << ' ' << motion.hands(t, c);
    out << '\n';
  }
  out << "anchors " << motion.anchors.size() << '\n';
  for (const ContactAnchor& a : motion.anchors) {
    out << (a.hand == Hand::Left ? "left" : "right") << ' ' << a.startFrame << ' '
        << a.vertexIndex;
    for (int i = 0; i < 3; ++i) out << ' ' << a.offset(i);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ' ' << a.anchorRotation(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("saveMotion: failed writing " + path.string());
}

MotionData loadMotion(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("loadMotion: cannot open " + path.string());

  std::string header;
  std::getline(in, header);
  if (header != "msynth-motion v1") {
    throw IoError("loadMotion: unsupported header in " + path.string());
  }

  MotionData out;
  std::string keyword;
  Eigen::Index rotated = -1, frames = 0;
  if (!(in >> keyword >> out.fps) || keyword != "fps" || !(out.fps > 0.0)) {
    throw IoError("loadMotion: bad fps line in " + path.string());
  }
  if (!(in >> keyword >> rotated) || keyword != "rotated" || rotated < 0) {
    throw IoError("loadMotion: bad rotated line in " + path.string());
  }
  if (!(in >> keyword >> frames) || keyword != "frames" || frames < 1) {
    throw IoError("loadMotion: bad frames line in " + path.string());
  }

  out.poseFlat.resize(frames, 3 + 6 * rotated);
  out.hands.resize(frames, 6);
  for (Eigen::Index t = 0; t < frames; ++t) {
    Eigen::Index idx = -1;
    in >> idx;
    for (Eigen::Index c = 0; c < out.poseFlat.cols(); ++c) in >> out.poseFlat(t, c);
    for (Eigen::Index c = 0; c < 6; ++c) in >> out.hands(t, c);
    if (!in || idx != t) {
      throw IoError("loadMotion: malformed frame record " + std::to_string(t) + " in " +
                    path.string());
    }
  }

  std::size_t anchorCount = 0;
  if (!(in >> keyword >> anchorCount) || keyword != "anchors") {
    throw IoError("loadMotion: bad anchors line in " + path.string());
  }
  out.anchors.resize(anchorCount);
  for (ContactAnchor& a : out.anchors) {
    std::string side;
    in >> side >> a.startFrame >> a.vertexIndex;
    for (int i = 0; i < 3; ++i) in >> a.offset(i);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) in >> a.anchorRotation(r, c);
    }
    if (!in || (side != "left" && side != "right") || a.startFrame < 0 || a.startFrame >= frames ||
        a.vertexIndex < 0) {
      throw IoError("loadMotion: malformed anchor record in " + path.string());
    }
    a.hand = side == "left" ? Hand::Left : Hand::Right;
  }
  return out;
}

}  // namespace msynth
