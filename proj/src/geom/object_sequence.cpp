#include "msynth/geom/object_sequence.hpp"

#include <fstream>
#include <sstream>

namespace msynth {

Matrix3Xd ObjectSequence::verticesAt(Eigen::Index t) const {
  if (t < 0 || t >= frames()) {
    throw std::out_of_range("ObjectSequence::verticesAt: frame index out of range");
  }
  return transforms[static_cast<std::size_t>(t)].applyPoints(mesh.vertices);
}

Vector3d ObjectSequence::vertexAt(Eigen::Index t, Eigen::Index vertex) const {
  if (t < 0 || t >= frames()) {
    throw std::out_of_range("ObjectSequence::vertexAt: frame index out of range");
  }
  if (vertex < 0 || vertex >= mesh.vertexCount()) {
    throw std::out_of_range("ObjectSequence::vertexAt: vertex index out of range");
  }
  return transforms[static_cast<std::size_t>(t)].apply(mesh.vertices.col(vertex));
}

void ObjectSequence::validate() const {
  mesh.validate();
  if (transforms.empty()) {
    throw std::invalid_argument("ObjectSequence: needs at least one frame");
  }
  for (const auto& t : transforms) {
    if (!t.isValid() || std::abs(t.scale - 1.0) > 1e-9) {
      throw std::invalid_argument("ObjectSequence: transform is not rigid");
    }
  }
  if (!(fps > 0.0)) throw std::invalid_argument("ObjectSequence: fps must be positive");
}

Trajectory loadTrajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("loadTrajectory: cannot open " + path.string());

  std::string header;
  std::getline(in, header);
  if (header != "msynth-trajectory v1") {
    throw IoError("loadTrajectory: unsupported header in " + path.string());
  }

  Trajectory out;
  std::string keyword;
  Eigen::Index frames = 0;
  if (!(in >> keyword >> out.fps) || keyword != "fps" || !(out.fps > 0.0)) {
    throw IoError("loadTrajectory: bad fps line in " + path.string());
  }
  if (!(in >> keyword >> frames) || keyword != "frames" || frames < 1) {
    throw IoError("loadTrajectory: bad frames line in " + path.string());
  }

  out.transforms.resize(static_cast<std::size_t>(frames));
  for (Eigen::Index t = 0; t < frames; ++t) {
    Eigen::Index idx = -1;
    RigidTransform xf;
    in >> idx;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) in >> xf.rotation(r, c);
    }
    in >> xf.translation.x() >> xf.translation.y() >> xf.translation.z();
    if (!in || idx != t) {
      throw IoError("loadTrajectory: malformed frame record " + std::to_string(t) +
                    " in " + path.string());
    }
    if (!xf.isValid()) {
      throw IoError("loadTrajectory: frame " + std::to_string(t) +
                    " rotation is not orthonormal in " + path.string());
    }
    out.transforms[static_cast<std::size_t>(t)] = xf;
  }
  return out;
}

void saveTrajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("saveTrajectory: cannot open " + path.string());
  out.precision(17);
  out << "msynth-trajectory v1\n";
  out << "fps " << trajectory.fps << '\n';
  out << "frames " << trajectory.transforms.size() << '\n';
  for (std::size_t t = 0; t < trajectory.transforms.size(); ++t) {
    const auto& xf = trajectory.transforms[t];
    out << t;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ' ' << xf.rotation(r, c);
    }
    out << ' ' << xf.translation.x() << ' ' << xf.translation.y() << ' '
        << xf.translation.z() << '\n';
  }
  if (!out) throw IoError("saveTrajectory: write failed for " + path.string());
}

}  // namespace msynth
