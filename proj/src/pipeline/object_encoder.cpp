#include "msynth/pipeline/object_encoder.hpp"

namespace msynth {

void ObjectEncoderConfig::validate() const {
  if (nBps < 1) throw ConfigError("ObjectEncoderConfig: nBps must be positive");
  if (radius <= 0.0) throw ConfigError("ObjectEncoderConfig: radius must be positive");
  if (dObj < 1) throw ConfigError("ObjectEncoderConfig: dObj must be positive");
  if (hidden < 0) throw ConfigError("ObjectEncoderConfig: hidden must be >= 0");
}

MatrixXd rawObjectFeatures(const ObjectSequence& seq, const BpsBasis& basis) {
  seq.validate();
  basis.validate();
  MatrixXd raw(seq.frames(), 3 + 3 * basis.size());
  for (Eigen::Index t = 0; t < seq.frames(); ++t) {
    raw.row(t) = rawBpsVector(computeBps(basis, seq.verticesAt(t))).transpose();
  }
  return raw;
}

ObjectEncoder::ObjectEncoder(ParamStore& store, const std::string& prefix,
                             const ObjectEncoderConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  cfg_.validate();
  mlp_ = Mlp(store, prefix, {cfg_.rawDim(), cfg_.hiddenDim(), cfg_.dObj}, rng);
}

VarPtr ObjectEncoder::project(const std::vector<VarPtr>& leaves, const VarPtr& raw) const {
  return mlp_.forward(leaves, raw);
}

MatrixXd ObjectEncoder::projectValue(const ParamStore& store, const MatrixXd& raw) const {
  return mlp_.forwardValue(store, raw);
}

}  // namespace msynth
