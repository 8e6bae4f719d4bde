#pragma once

#include "msynth/geom/bps.hpp"
#include "msynth/geom/object_sequence.hpp"
#include "msynth/nn/mlp.hpp"

namespace msynth {

struct ObjectEncoderConfig {
  Eigen::Index nBps = 1024;   // basis points
  double radius = 1.0;        // basis ball radius, meters
  std::uint64_t seed = 2024;  // basis seed
  Eigen::Index dObj = 256;    // projected per-frame feature width
  Eigen::Index hidden = 0;    // projector hidden width, 0 -> 2 * dObj

  Eigen::Index rawDim() const { return 3 + 3 * nBps; }
  Eigen::Index hiddenDim() const { return hidden > 0 ? hidden : 2 * dObj; }
  void validate() const;
};

/// Per-frame geometry descriptor rows: [centroid, delta_0 .. delta_{n-1}],
/// frames x (3 + 3 n_bps).
MatrixXd rawObjectFeatures(const ObjectSequence& seq, const BpsBasis& basis);

/// Learned projection of the raw descriptor to the condition tokens the
/// denoiser sees. Registers its MLP in the shared store so it trains
/// jointly with stage 1.
class ObjectEncoder {
 public:
  ObjectEncoder() = default;
  ObjectEncoder(ParamStore& store, const std::string& prefix, const ObjectEncoderConfig& cfg,
                Rng& rng);

  const ObjectEncoderConfig& config() const { return cfg_; }

  /// Graph-recording projection: raw is frames x rawDim -> frames x dObj.
  VarPtr project(const std::vector<VarPtr>& leaves, const VarPtr& raw) const;

  /// Value-only projection over the store's current weights.
  MatrixXd projectValue(const ParamStore& store, const MatrixXd& raw) const;

 private:
  ObjectEncoderConfig cfg_;
  Mlp mlp_;
};

}  // namespace msynth
