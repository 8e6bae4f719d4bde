#pragma once

#include "msynth/nn/mlp.hpp"

namespace msynth {

struct DenoiserConfig {
  Eigen::Index dX = 0;        // per-frame sample width
  Eigen::Index dCond = 0;     // per-frame condition width
  Eigen::Index dModel = 512;  // token width through the blocks
  Eigen::Index dQkv = 256;    // packed query/key/value width (all heads)
  int heads = 4;
  int blocks = 4;
  bool positionalEncoding = true;

  void validate() const;
};

/// Sinusoidal position code, one row per position in [0, count).
MatrixXd sinusoidalEncoding(Eigen::Index count, Eigen::Index dim);
/// Single row of the same code at an arbitrary position (noise levels).
MatrixXd sinusoidalRow(double position, Eigen::Index dim);

/// Pre-norm transformer over frame tokens that predicts the clean sample
/// from a noisy one. Per frame the noisy sample and condition are
/// concatenated and projected to dModel; a 2-layer MLP of the sinusoidal
/// noise-level code is added to every token; self-attention blocks plus a
/// zero-initialized output projection map back to dX, so a fresh model
/// predicts exactly zero.
class TransformerDenoiser {
 public:
  TransformerDenoiser() = default;
  TransformerDenoiser(ParamStore& store, const std::string& prefix, const DenoiserConfig& cfg,
                      Rng& rng);

  const DenoiserConfig& config() const { return cfg_; }

  /// Graph-recording forward: xNoisy is T x dX, cond is T x dCond, noise
  /// level n >= 1. Returns the T x dX clean-sample prediction.
  VarPtr forward(const std::vector<VarPtr>& leaves, const VarPtr& xNoisy, const VarPtr& cond,
                 int noiseLevel) const;

  /// Value-only convenience for single calls; reuses nothing between calls.
  MatrixXd predict(const ParamStore& store, const MatrixXd& xNoisy, const MatrixXd& cond,
                   int noiseLevel) const;

  /// Graph-free forward; arithmetic mirrors the recorded version exactly,
  /// so it is bit-identical to predict() while skipping tape bookkeeping.
  /// This is the sampling hot path.
  MatrixXd forwardValue(const ParamStore& store, const MatrixXd& xNoisy, const MatrixXd& cond,
                        int noiseLevel) const;

 private:
  struct Block {
    std::size_t ln1Gain, ln1Bias;
    std::size_t q, qBias, k, kBias, v, vBias;
    std::size_t att, attBias;
    std::size_t ln2Gain, ln2Bias;
    Mlp ff;
  };

  DenoiserConfig cfg_;
  std::size_t inW_ = 0, inB_ = 0;
  Mlp noiseMlp_;
  std::vector<Block> blocks_;
  std::size_t finalGain_ = 0, finalBias_ = 0;
  std::size_t outW_ = 0, outB_ = 0;
};

/// Gradient-free leaves over the current parameter values; build once per
/// sampling run and reuse across forward calls.
std::vector<VarPtr> constantLeaves(const ParamStore& store);

}  // namespace msynth
