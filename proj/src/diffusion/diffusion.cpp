#include "msynth/diffusion/diffusion.hpp"

#include "msynth/parallel.hpp"

#include <cmath>

namespace msynth {

namespace {

MatrixXd standardNormal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal01(rng);
  }
  return m;
}

}  // namespace

MatrixXd forwardNoise(const NoiseSchedule& schedule, const MatrixXd& x0, int n, Rng& rng) {
  if (n < 1 || n > schedule.steps()) {
    throw std::out_of_range("forwardNoise: noise level out of range");
  }
  const double abar = schedule.alphaBarAt(n);
  return std::sqrt(abar) * x0 +
         std::sqrt(1.0 - abar) * standardNormal(x0.rows(), x0.cols(), rng);
}

MatrixXd posteriorMean(const NoiseSchedule& schedule, const MatrixXd& xn,
                       const MatrixXd& x0Hat, int n) {
  if (n < 1 || n > schedule.steps()) {
    throw std::out_of_range("posteriorMean: noise level out of range");
  }
  if (xn.rows() != x0Hat.rows() || xn.cols() != x0Hat.cols()) {
    throw std::invalid_argument("posteriorMean: shape mismatch");
  }
  // abar_0 = 1 makes the x_n coefficient exactly zero and the x0_hat
  // coefficient exactly one; evaluate that case without rounding.
  if (n == 1) return x0Hat;
  const double alpha = schedule.alphaAt(n);
  const double abar = schedule.alphaBarAt(n);
  const double abarPrev = schedule.alphaBarAt(n - 1);
  return (std::sqrt(alpha) * (1.0 - abarPrev) * xn +
          std::sqrt(abarPrev) * (1.0 - alpha) * x0Hat) /
         (1.0 - abar);
}

MatrixXd Normalization::apply(const MatrixXd& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("Normalization: width mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

MatrixXd Normalization::invert(const MatrixXd& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("Normalization: width mismatch");
  return (x.array().rowwise() * std.transpose().array()).matrix().rowwise() +
         mean.transpose();
}

Normalization Normalization::fit(const std::vector<MatrixXd>& sequences, double floorStd) {
  if (sequences.empty()) throw std::invalid_argument("Normalization::fit: no data");
  const Eigen::Index dim = sequences.front().cols();
  Eigen::Index rows = 0;
  VectorXd sum = VectorXd::Zero(dim);
  for (const MatrixXd& s : sequences) {
    if (s.cols() != dim) throw std::invalid_argument("Normalization::fit: width mismatch");
    sum += s.colwise().sum().transpose();
    rows += s.rows();
  }
  Normalization norm;
  norm.mean = sum / static_cast<double>(rows);
  VectorXd sq = VectorXd::Zero(dim);
  for (const MatrixXd& s : sequences) {
    sq += (s.rowwise() - norm.mean.transpose()).array().square().colwise().sum().matrix().transpose();
  }
  norm.std = (sq / static_cast<double>(rows)).array().sqrt().max(floorStd);
  return norm;
}

Normalization Normalization::identity(Eigen::Index dim) {
  Normalization norm;
  norm.mean = VectorXd::Zero(dim);
  norm.std = VectorXd::Ones(dim);
  return norm;
}

MatrixXd diffusionSample(const DenoiseFn& denoise, const NoiseSchedule& schedule,
                         Eigen::Index frames, Eigen::Index dim, Rng& rng) {
  MatrixXd x = standardNormal(frames, dim, rng);
  for (int n = schedule.steps(); n >= 1; --n) {
    const MatrixXd x0Hat = denoise(x, n);
    MatrixXd mu = posteriorMean(schedule, x, x0Hat, n);
    if (n > 1) {
      mu += std::sqrt(schedule.sigma2(n)) * standardNormal(frames, dim, rng);
    }
    x = std::move(mu);
  }
  return x;
}

double diffusionTrainStep(const TransformerDenoiser& model, ParamStore& store,
                          const NoiseSchedule& schedule,
                          const std::vector<DiffusionBatchItem>& batch, Rng& rng,
                          const AdamConfig& adamCfg, AdamState& adamState, int workers) {
  if (batch.empty()) throw std::invalid_argument("diffusionTrainStep: empty batch");
  const std::size_t count = batch.size();

  // Per-item noise level and noise seed are drawn up front from the caller's
  // stream so the result is independent of worker scheduling.
  std::vector<int> levels(count);
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t e = 0; e < count; ++e) {
    levels[e] = static_cast<int>(uniformInt(rng, 1, schedule.steps()));
    seeds[e] = rng();
  }

  std::vector<double> losses(count, 0.0);
  std::vector<std::vector<MatrixXd>> grads(count);
  parallelFor(
      count,
      [&](std::size_t e) {
        const DiffusionBatchItem& item = batch[e];
        Rng noiseRng = makeRng(seeds[e]);
        const MatrixXd xn = forwardNoise(schedule, item.x0, levels[e], noiseRng);
        const std::vector<VarPtr> leaves = store.makeLeaves();
        const VarPtr cond = item.condition(leaves);
        const VarPtr pred = model.forward(leaves, constant(xn), cond, levels[e]);
        const VarPtr loss = scale(meanAbsError(pred, item.x0), 1.0 / static_cast<double>(count));
        backward(loss);
        losses[e] = loss->value(0, 0) * static_cast<double>(count);
        grads[e] = collectGrads(leaves);
      },
      workers);

  double total = 0.0;
  std::vector<MatrixXd> reduced = std::move(grads[0]);
  for (std::size_t e = 1; e < count; ++e) {
    for (std::size_t p = 0; p < reduced.size(); ++p) reduced[p] += grads[e][p];
  }
  for (std::size_t e = 0; e < count; ++e) total += losses[e];
  const double meanLoss = total / static_cast<double>(count);
  if (!std::isfinite(meanLoss)) {
    throw TrainingDiverged("diffusionTrainStep: non-finite loss " + std::to_string(meanLoss) +
                           " at optimizer step " + std::to_string(adamState.step + 1));
  }
  adamStep(adamCfg, adamState, store, reduced);
  return meanLoss;
}

}  // namespace msynth
