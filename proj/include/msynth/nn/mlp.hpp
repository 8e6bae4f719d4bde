#pragma once

#include "msynth/nn/param.hpp"

namespace msynth {

/// Fully connected stack: linear layers with GELU between them (none after
/// the last). Parameters live in the shared store under `prefix.layer<i>.*`.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& prefix, const std::vector<Eigen::Index>& widths,
      Rng& rng);

  /// input: rows x widths.front() -> rows x widths.back()
  VarPtr forward(const std::vector<VarPtr>& leaves, const VarPtr& input) const;

  /// Graph-free forward over the store's current values; bit-identical to
  /// the recorded version.
  MatrixXd forwardValue(const ParamStore& store, const MatrixXd& input) const;

  Eigen::Index inputDim() const { return widths_.front(); }
  Eigen::Index outputDim() const { return widths_.back(); }

 private:
  std::vector<Eigen::Index> widths_;
  std::vector<std::size_t> weights_;  // store indices
  std::vector<std::size_t> biases_;
};

}  // namespace msynth
