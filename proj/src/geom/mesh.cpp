#include "msynth/geom/mesh.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace msynth {

Vector3d Mesh::centroid() const {
  if (vertices.cols() == 0) throw std::invalid_argument("Mesh::centroid: empty mesh");
  return vertices.rowwise().mean();
}

void Mesh::bounds(Vector3d& lo, Vector3d& hi) const {
  if (vertices.cols() == 0) throw std::invalid_argument("Mesh::bounds: empty mesh");
  lo = vertices.rowwise().minCoeff();
  hi = vertices.rowwise().maxCoeff();
}

void Mesh::validate() const {
  if (vertices.cols() < 1) {
    throw std::invalid_argument("Mesh: needs at least one vertex");
  }
  if (!vertices.allFinite()) {
    throw std::invalid_argument("Mesh '" + name + "': non-finite vertex coordinate");
  }
  const Eigen::Index k = vertices.cols();
  for (Eigen::Index f = 0; f < faces.cols(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int idx = faces(c, f);
      if (idx < 0 || idx >= k) {
        throw std::invalid_argument("Mesh '" + name + "': face index out of range");
      }
    }
  }
}

Mesh loadObj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("loadObj: cannot open " + path.string());

  std::vector<Vector3d> verts;
  std::vector<Eigen::Vector3i> tris;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword) || keyword[0] == '#') continue;
    if (keyword == "v") {
      Vector3d v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw IoError("loadObj: malformed vertex at " + path.string() + ":" +
                      std::to_string(lineNo));
      }
      verts.push_back(v);
    } else if (keyword == "f") {
      std::array<int, 3> idx{};
      for (int c = 0; c < 3; ++c) {
        std::string token;
        if (!(ls >> token)) {
          throw IoError("loadObj: face needs 3 indices at " + path.string() + ":" +
                        std::to_string(lineNo));
        }
        // vertex index is the part before the first '/'
        const std::size_t slash = token.find('/');
        if (slash != std::string::npos) token.resize(slash);
        const int one_based = std::stoi(token);
        if (one_based < 1 || one_based > static_cast<int>(verts.size())) {
          throw IoError("loadObj: face index out of range at " + path.string() + ":" +
                        std::to_string(lineNo));
        }
        idx[c] = one_based - 1;
      }
      std::string extra;
      if (ls >> extra) {
        throw IoError("loadObj: only triangle faces supported at " + path.string() + ":" +
                      std::to_string(lineNo));
      }
      tris.emplace_back(idx[0], idx[1], idx[2]);
    }
    // other keywords (vn, vt, o, ...) are outside the subset and skipped
  }

  Mesh mesh;
  mesh.name = path.stem().string();
  mesh.vertices.resize(3, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.col(i) = verts[i];
  mesh.faces.resize(3, static_cast<Eigen::Index>(tris.size()));
  for (std::size_t i = 0; i < tris.size(); ++i) mesh.faces.col(i) = tris[i];
  mesh.validate();
  return mesh;
}

void saveObj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("saveObj: cannot open " + path.string());
  out.precision(17);
  for (Eigen::Index i = 0; i < mesh.vertices.cols(); ++i) {
    out << "v " << mesh.vertices(0, i) << ' ' << mesh.vertices(1, i) << ' '
        << mesh.vertices(2, i) << '\n';
  }
  for (Eigen::Index f = 0; f < mesh.faces.cols(); ++f) {
    out << "f " << mesh.faces(0, f) + 1 << ' ' << mesh.faces(1, f) + 1 << ' '
        << mesh.faces(2, f) + 1 << '\n';
  }
  if (!out) throw IoError("saveObj: write failed for " + path.string());
}

}  // namespace msynth
