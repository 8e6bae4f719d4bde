#include "msynth/nn/mlp.hpp"

namespace msynth {

Mlp::Mlp(ParamStore& store, const std::string& prefix,
         const std::vector<Eigen::Index>& widths, Rng& rng)
    : widths_(widths) {
  if (widths.size() < 2) throw ConfigError("Mlp: needs at least input and output widths");
  for (const Eigen::Index w : widths) {
    if (w < 1) throw ConfigError("Mlp: widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::string layer = prefix + ".layer" + std::to_string(l);
    weights_.push_back(store.add(layer + ".W", glorotInit(widths[l], widths[l + 1], rng)));
    biases_.push_back(store.add(layer + ".b", MatrixXd::Zero(1, widths[l + 1])));
  }
}

VarPtr Mlp::forward(const std::vector<VarPtr>& leaves, const VarPtr& input) const {
  if (input->value.cols() != inputDim()) {
    throw std::invalid_argument("Mlp::forward: input width mismatch");
  }
  VarPtr h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = addRowVector(matmul(h, leaves[weights_[l]]), leaves[biases_[l]]);
    if (l + 1 < weights_.size()) h = gelu(h);
  }
  return h;
}

MatrixXd Mlp::forwardValue(const ParamStore& store, const MatrixXd& input) const {
  if (input.cols() != inputDim()) {
    throw std::invalid_argument("Mlp::forwardValue: input width mismatch");
  }
  MatrixXd h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    MatrixXd next = h * store.at(weights_[l]).value;
    next.rowwise() += store.at(biases_[l]).value.row(0);
    h = l + 1 < weights_.size() ? geluValue(next) : std::move(next);
  }
  return h;
}

}  // namespace msynth
