#pragma once

#include "msynth/diffusion/schedule.hpp"
#include "msynth/nn/denoiser.hpp"
#include "msynth/rng.hpp"

#include <functional>

namespace msynth {

/// Closed form of the noising chain:
/// x_n = sqrt(abar_n) x0 + sqrt(1 - abar_n) eps.
MatrixXd forwardNoise(const NoiseSchedule& schedule, const MatrixXd& x0, int n, Rng& rng);

/// Reverse-step mean from the clean-sample prediction:
/// mu = (sqrt(a_n)(1-abar_{n-1}) x_n + sqrt(abar_{n-1})(1-a_n) x0_hat) / (1-abar_n).
MatrixXd posteriorMean(const NoiseSchedule& schedule, const MatrixXd& xn,
                       const MatrixXd& x0Hat, int n);

/// Per-column standardization fitted on training data and undone after
/// sampling; constant columns get a floored deviation so they pass through.
struct Normalization {
  VectorXd mean;
  VectorXd std;

  MatrixXd apply(const MatrixXd& x) const;
  MatrixXd invert(const MatrixXd& x) const;
  static Normalization fit(const std::vector<MatrixXd>& sequences, double floorStd = 1e-6);
  static Normalization identity(Eigen::Index dim);
};

/// Clean-sample predictor at a given noise level; adapts any model (or test
/// oracle) to the sampler.
using DenoiseFn = std::function<MatrixXd(const MatrixXd& xNoisy, int n)>;

/// Ancestral sampling from pure noise: x^N ~ N(0, I), then
/// x^{n-1} = mu + sigma_n z for n = N..2 and x^0 = mu at n = 1.
MatrixXd diffusionSample(const DenoiseFn& denoise, const NoiseSchedule& schedule,
                         Eigen::Index frames, Eigen::Index dim, Rng& rng);

/// One training example: a clean sequence and a builder that yields its
/// per-frame condition tokens inside the recorded graph (so conditioning
/// modules train jointly with the denoiser).
struct DiffusionBatchItem {
  MatrixXd x0;  // frames x dX, already normalized by the caller
  std::function<VarPtr(const std::vector<VarPtr>& leaves)> condition;
};

/// One optimizer step of the x0-reconstruction objective: per item a noise
/// level is drawn uniformly from [1, N], the item is noised, and the L1 mean
/// between prediction and x0 is minimized. Returns the batch loss. Batch
/// elements may be processed on `workers` threads; gradients are reduced in
/// item order so results do not depend on the worker count.
double diffusionTrainStep(const TransformerDenoiser& model, ParamStore& store,
                          const NoiseSchedule& schedule,
                          const std::vector<DiffusionBatchItem>& batch, Rng& rng,
                          const AdamConfig& adamCfg, AdamState& adamState, int workers = 0);

}  // namespace msynth
