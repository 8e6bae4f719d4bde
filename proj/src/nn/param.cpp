#include "msynth/nn/param.hpp"

#include <cmath>

namespace msynth {

std::size_t ParamStore::add(const std::string& name, MatrixXd value) {
  if (find(name) != nullptr) throw ConfigError("ParamStore: duplicate parameter " + name);
  Parameter p;
  p.name = name;
  p.m = MatrixXd::Zero(value.rows(), value.cols());
  p.v = p.m;
  p.value = std::move(value);
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const Parameter& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t ParamStore::scalarCount() const {
  std::size_t total = 0;
  for (const Parameter& p : params_) total += static_cast<std::size_t>(p.value.size());
  return total;
}

std::vector<VarPtr> ParamStore::makeLeaves() const {
  std::vector<VarPtr> leaves;
  leaves.reserve(params_.size());
  for (const Parameter& p : params_) leaves.push_back(leaf(p.value));
  return leaves;
}

std::vector<MatrixXd> collectGrads(const std::vector<VarPtr>& leaves) {
  std::vector<MatrixXd> grads;
  grads.reserve(leaves.size());
  for (const VarPtr& l : leaves) {
    grads.push_back(l->grad.size() != 0
                        ? l->grad
                        : MatrixXd::Zero(l->value.rows(), l->value.cols()));
  }
  return grads;
}

MatrixXd glorotInit(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniformRange(rng, -bound, bound);
  }
  return m;
}

void adamStep(const AdamConfig& cfg, AdamState& state, ParamStore& store,
              const std::vector<MatrixXd>& grads) {
  if (grads.size() != store.size()) {
    throw std::invalid_argument("adamStep: gradient count mismatch");
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store.at(i);
    const MatrixXd& g = grads[i];
    if (g.rows() != p.value.rows() || g.cols() != p.value.cols()) {
      throw std::invalid_argument("adamStep: gradient shape mismatch for " + p.name);
    }
    if (!g.allFinite()) {
      throw TrainingDiverged("adamStep: non-finite gradient for parameter " + p.name);
    }
    p.m = cfg.beta1 * p.m + (1.0 - cfg.beta1) * g;
    p.v = cfg.beta2 * p.v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const MatrixXd mHat = p.m / correction1;
    const MatrixXd vHat = p.v / correction2;
    p.value.array() -= cfg.lr * mHat.array() / (vHat.array().sqrt() + cfg.eps);
  }
}

}  // namespace msynth
