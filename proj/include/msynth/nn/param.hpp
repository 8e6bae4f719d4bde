#pragma once

#include "msynth/nn/graph.hpp"
#include "msynth/rng.hpp"

#include <string>
#include <vector>

namespace msynth {

/// Named trainable tensor with its Adam moment accumulators.
struct Parameter {
  std::string name;
  MatrixXd value;
  MatrixXd m;  // first moment
  MatrixXd v;  // second moment
};

/// Flat, ordered collection of every parameter of a model. Modules register
/// into one store at construction; leaf vectors and gradient vectors align
/// with the store's order, and checkpoints address entries by name.
class ParamStore {
 public:
  std::size_t add(const std::string& name, MatrixXd value);

  std::size_t size() const { return params_.size(); }
  Parameter& at(std::size_t i) { return params_[i]; }
  const Parameter& at(std::size_t i) const { return params_[i]; }
  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }

  const Parameter* find(const std::string& name) const;
  std::size_t scalarCount() const;

  /// Fresh gradient-tracked leaves holding copies of the current values,
  /// aligned with the store order.
  std::vector<VarPtr> makeLeaves() const;

 private:
  std::vector<Parameter> params_;
};

/// Gradients of store-aligned leaves after backward(); zero matrices where a
/// leaf was never reached.
std::vector<MatrixXd> collectGrads(const std::vector<VarPtr>& leaves);

/// Glorot-uniform matrix for linear layers.
MatrixXd glorotInit(Eigen::Index rows, Eigen::Index cols, Rng& rng);

struct AdamConfig {
  double lr = 0.0002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::int64_t step = 0;
};

/// Bias-corrected Adam update over the whole store. `grads` aligns with the
/// store order. Throws TrainingDiverged, naming the parameter, on any
/// non-finite gradient.
void adamStep(const AdamConfig& cfg, AdamState& state, ParamStore& store,
              const std::vector<MatrixXd>& grads);

}  // namespace msynth
