#include "msynth/diffusion/diffusion.hpp"
#include "msynth/diffusion/schedule.hpp"

#include <doctest.h>

#include <cmath>

namespace {

using namespace msynth;

NoiseSchedule rawSchedule(const VectorXd& beta) {
  // bypasses validation on purpose (tests of degenerate schedules)
  return scheduleFromBetas(beta);
}

MatrixXd randomMatrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal01(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("schedule: hand-computed alpha products") {
  VectorXd beta(2);
  beta << 0.1, 0.2;
  const NoiseSchedule s = scheduleFromBetas(beta);
  s.validate();
  CHECK(s.alphaAt(1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.alphaAt(2) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(s.alphaBarAt(1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.alphaBarAt(2) == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(s.alphaBarAt(0) == 1.0);

  // default reverse variance is beta; the switch selects the posterior form
  CHECK(s.sigma2(2) == doctest::Approx(0.2).epsilon(1e-15));
  NoiseSchedule post = s;
  post.posteriorVariance = true;
  CHECK(post.sigma2(2) == doctest::Approx((1.0 - 0.9) / (1.0 - 0.72) * 0.2).epsilon(1e-12));
}

TEST_CASE("schedule: builders satisfy the product identity") {
  for (const NoiseSchedule& s : {linearSchedule(50), cosineSchedule(1000), linearSchedule(1)}) {
    s.validate();
    double product = 1.0;
    for (int n = 1; n <= s.steps(); ++n) {
      product *= s.alphaAt(n);
      CHECK(std::abs(s.alphaBarAt(n) - product) <= 1e-12);
      CHECK(s.betaAt(n) > 0.0);
      CHECK(s.betaAt(n) < 1.0);
    }
  }
  const NoiseSchedule desk = linearSchedule(50, 1e-4, 0.02);
  CHECK(desk.betaAt(1) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(desk.betaAt(50) == doctest::Approx(0.02).epsilon(1e-15));

  VectorXd bad(2);
  bad << 0.5, 1.5;
  CHECK_THROWS_AS(rawSchedule(bad).validate(), ConfigError);
  CHECK_THROWS_AS(linearSchedule(0), ConfigError);
}

TEST_CASE("forward noise: zero-beta schedule is the identity") {
  const NoiseSchedule zero = rawSchedule(VectorXd::Zero(3));
  Rng rng = makeRng(1);
  const MatrixXd x0 = randomMatrix(rng, 4, 5);
  CHECK(forwardNoise(zero, x0, 3, rng) == x0);

  const NoiseSchedule s = linearSchedule(10);
  CHECK_THROWS_AS(forwardNoise(s, x0, 0, rng), std::out_of_range);
  CHECK_THROWS_AS(forwardNoise(s, x0, 11, rng), std::out_of_range);
}

TEST_CASE("forward noise: Monte Carlo moments match the closed form") {
  VectorXd beta(2);
  beta << 0.1, 0.2;
  const NoiseSchedule s = scheduleFromBetas(beta);
  const int draws = 100000;
  const double wantVar = 1.0 - 0.72;

  Rng rng = makeRng(99);
  const MatrixXd x0 = MatrixXd::Zero(1, 4);
  MatrixXd sum = MatrixXd::Zero(1, 4), sumSq = MatrixXd::Zero(1, 4);
  for (int i = 0; i < draws; ++i) {
    const MatrixXd xn = forwardNoise(s, x0, 2, rng);
    sum += xn;
    sumSq += xn.cwiseProduct(xn);
  }
  const MatrixXd mean = sum / draws;
  const MatrixXd var = sumSq / draws - mean.cwiseProduct(mean);
  const double meanSe = std::sqrt(wantVar / draws);
  const double varSe = wantVar * std::sqrt(2.0 / (draws - 1));
  for (int c = 0; c < 4; ++c) {
    CHECK(std::abs(mean(0, c)) < 3 * meanSe);
    CHECK(std::abs(var(0, c) - wantVar) < 3 * varSe);
  }
}

TEST_CASE("forward noise: closed form matches the iterated chain") {
  VectorXd beta(3);
  beta << 0.1, 0.2, 0.3;
  const NoiseSchedule s = scheduleFromBetas(beta);
  const double x0 = 0.7;
  const int draws = 100000;

  Rng rng = makeRng(7);
  double closedSum = 0.0, closedSq = 0.0, chainSum = 0.0, chainSq = 0.0;
  const MatrixXd x0m = MatrixXd::Constant(1, 1, x0);
  for (int i = 0; i < draws; ++i) {
    closedSum += forwardNoise(s, x0m, 3, rng)(0, 0);
    double x = x0;
    for (int n = 1; n <= 3; ++n) {
      x = std::sqrt(1.0 - s.betaAt(n)) * x + std::sqrt(s.betaAt(n)) * normal01(rng);
    }
    chainSum += x;
    chainSq += x * x;
  }
  // recompute closed-form squares with a fresh pass (keeps streams aligned)
  Rng rng2 = makeRng(7);
  for (int i = 0; i < draws; ++i) {
    const double v = forwardNoise(s, x0m, 3, rng2)(0, 0);
    closedSq += v * v;
    double x = x0;
    for (int n = 1; n <= 3; ++n) {
      x = std::sqrt(1.0 - s.betaAt(n)) * x + std::sqrt(s.betaAt(n)) * normal01(rng2);
    }
  }
  const double abar = s.alphaBarAt(3);
  const double wantMean = std::sqrt(abar) * x0;
  const double wantVar = 1.0 - abar;
  const double meanSe = std::sqrt(wantVar / draws);
  const double varSe = wantVar * std::sqrt(2.0 / (draws - 1));

  const double closedMean = closedSum / draws;
  const double chainMean = chainSum / draws;
  CHECK(std::abs(closedMean - wantMean) < 3 * meanSe);
  CHECK(std::abs(chainMean - wantMean) < 3 * meanSe);
  CHECK(std::abs(closedSq / draws - closedMean * closedMean - wantVar) < 3 * varSe);
  CHECK(std::abs(chainSq / draws - chainMean * chainMean - wantVar) < 3 * varSe);
}

TEST_CASE("posterior mean: n=1 returns the prediction, scalar hand check") {
  VectorXd beta(2);
  beta << 0.1, 0.2;
  const NoiseSchedule s = scheduleFromBetas(beta);
  Rng rng = makeRng(3);
  const MatrixXd xn = randomMatrix(rng, 3, 2);
  const MatrixXd x0Hat = randomMatrix(rng, 3, 2);
  CHECK(posteriorMean(s, xn, x0Hat, 1) == x0Hat);

  // with x0_hat = x_n the mean is a scalar multiple of x_n
  const double want =
      (std::sqrt(0.8) * (1.0 - 0.9) + std::sqrt(0.9) * (1.0 - 0.8)) / (1.0 - 0.72);
  const MatrixXd mu = posteriorMean(s, xn, xn, 2);
  CHECK((mu - want * xn).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(posteriorMean(s, xn, x0Hat, 0), std::out_of_range);
  CHECK_THROWS_AS(posteriorMean(s, xn, randomMatrix(rng, 2, 2), 2), std::invalid_argument);
}

TEST_CASE("normalization: fit, round trip, constant columns") {
  MatrixXd a(2, 3), b(1, 3);
  a << 1, 10, 5, 3, 10, 5, b << 2, 10, 5;
  // column stats over all 3 rows: mean (2, 10, 5), population std (sqrt(2/3), 0, 0)
  const Normalization norm = Normalization::fit({a, b});
  CHECK(norm.mean(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(norm.mean(1) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(norm.std(0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(norm.std(1) == 1e-6);  // floored

  const MatrixXd applied = norm.apply(a);
  CHECK(applied.col(1).cwiseAbs().maxCoeff() == 0.0);  // constant -> zero
  CHECK((norm.invert(applied) - a).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng = makeRng(4);
  const MatrixXd data = randomMatrix(rng, 40, 6);
  const Normalization n2 = Normalization::fit({data});
  CHECK((n2.invert(n2.apply(data)) - data).cwiseAbs().maxCoeff() < 1e-12);
  const MatrixXd z = n2.apply(data);
  for (int c = 0; c < 6; ++c) {
    CHECK(z.col(c).mean() == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("sampling: N=1 returns the model prediction exactly") {
  const NoiseSchedule s = linearSchedule(1, 0.05, 0.05);
  Rng rng = makeRng(5);
  MatrixXd seen;
  const MatrixXd answer = randomMatrix(rng, 4, 3);
  const DenoiseFn oracle = [&](const MatrixXd& x, int n) {
    CHECK(n == 1);
    seen = x;
    return answer;
  };
  Rng sampleRng = makeRng(11);
  const MatrixXd out = diffusionSample(oracle, s, 4, 3, sampleRng);
  CHECK(out == answer);
  CHECK(seen.rows() == 4);
}

TEST_CASE("sampling: constant oracle collapses to its value for any N") {
  Rng rng = makeRng(6);
  const MatrixXd target = randomMatrix(rng, 2, 3);
  const DenoiseFn oracle = [&](const MatrixXd&, int) { return target; };
  for (int n = 1; n <= 4; ++n) {
    Rng sampleRng = makeRng(100 + static_cast<std::uint64_t>(n));
    const MatrixXd out = diffusionSample(oracle, linearSchedule(n, 0.05, 0.3), 2, 3, sampleRng);
    CHECK((out - target).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sampling: seeded determinism") {
  const NoiseSchedule s = linearSchedule(8, 0.01, 0.3);
  const DenoiseFn damp = [](const MatrixXd& x, int) { return (0.5 * x).eval(); };
  Rng a = makeRng(42), b = makeRng(42), c = makeRng(43);
  const MatrixXd outA = diffusionSample(damp, s, 5, 2, a);
  const MatrixXd outB = diffusionSample(damp, s, 5, 2, b);
  const MatrixXd outC = diffusionSample(damp, s, 5, 2, c);
  CHECK(outA == outB);
  CHECK(outA != outC);
}

TEST_CASE("training: loss halves on a tiny fixed dataset") {
  Rng rng = makeRng(21);
  DenoiserConfig cfg;
  cfg.dX = 2;
  cfg.dCond = 1;
  cfg.dModel = 16;
  cfg.dQkv = 16;
  cfg.heads = 2;
  cfg.blocks = 2;
  ParamStore store;
  const TransformerDenoiser model(store, "m", cfg, rng);

  const NoiseSchedule schedule = linearSchedule(10, 0.01, 0.3);
  std::vector<DiffusionBatchItem> batch;
  for (int e = 0; e < 4; ++e) {
    DiffusionBatchItem item;
    item.x0 = randomMatrix(rng, 5, 2);
    const MatrixXd cond = MatrixXd::Constant(5, 1, e % 2 == 0 ? 1.0 : -1.0);
    item.condition = [cond](const std::vector<VarPtr>&) { return constant(cond); };
    batch.push_back(std::move(item));
  }

  AdamConfig adam;
  adam.lr = 0.005;
  AdamState state;
  Rng trainRng = makeRng(7);
  double first = 0.0, last = 0.0;
  for (int step = 0; step < 200; ++step) {
    const double loss = diffusionTrainStep(model, store, schedule, batch, trainRng, adam, state);
    if (step == 0) first = loss;
    last = loss;
  }
  CHECK(first > 0.0);
  CHECK(last < 0.5 * first);
}

TEST_CASE("training: worker count does not change the result") {
  const auto run = [](int workers) {
    Rng rng = makeRng(33);
    DenoiserConfig cfg;
    cfg.dX = 2;
    cfg.dCond = 1;
    cfg.dModel = 8;
    cfg.dQkv = 8;
    cfg.heads = 2;
    cfg.blocks = 1;
    ParamStore store;
    const TransformerDenoiser model(store, "m", cfg, rng);
    const NoiseSchedule schedule = linearSchedule(6, 0.01, 0.2);
    std::vector<DiffusionBatchItem> batch;
    for (int e = 0; e < 5; ++e) {
      DiffusionBatchItem item;
      item.x0 = randomMatrix(rng, 4, 2);
      const MatrixXd cond = randomMatrix(rng, 4, 1);
      item.condition = [cond](const std::vector<VarPtr>&) { return constant(cond); };
      batch.push_back(std::move(item));
    }
    AdamConfig adam;
    AdamState state;
    Rng trainRng = makeRng(3);
    std::vector<double> losses;
    for (int step = 0; step < 10; ++step) {
      losses.push_back(
          diffusionTrainStep(model, store, schedule, batch, trainRng, adam, state, workers));
    }
    std::vector<MatrixXd> params;
    for (const Parameter& p : store.all()) params.push_back(p.value);
    return std::make_pair(losses, params);
  };
  const auto [loss1, params1] = run(1);
  const auto [loss4, params4] = run(4);
  CHECK(loss1 == loss4);
  for (std::size_t i = 0; i < params1.size(); ++i) CHECK(params1[i] == params4[i]);
}

TEST_CASE("training: poisoned parameters raise a divergence error") {
  Rng rng = makeRng(44);
  DenoiserConfig cfg;
  cfg.dX = 1;
  cfg.dCond = 1;
  cfg.dModel = 8;
  cfg.dQkv = 8;
  cfg.heads = 1;
  cfg.blocks = 1;
  ParamStore store;
  const TransformerDenoiser model(store, "m", cfg, rng);
  store.at(0).value(0, 0) = std::nan("");

  std::vector<DiffusionBatchItem> batch(1);
  batch[0].x0 = MatrixXd::Ones(3, 1);
  batch[0].condition = [](const std::vector<VarPtr>&) {
    return constant(MatrixXd::Zero(3, 1));
  };
  AdamConfig adam;
  AdamState state;
  Rng trainRng = makeRng(1);
  CHECK_THROWS_AS(
      diffusionTrainStep(model, store, linearSchedule(4), batch, trainRng, adam, state),
      TrainingDiverged);
}

TEST_CASE("training: toy conditional distribution is recovered") {
  Rng rng = makeRng(55);
  DenoiserConfig cfg;
  cfg.dX = 1;
  cfg.dCond = 1;
  cfg.dModel = 16;
  cfg.dQkv = 16;
  cfg.heads = 2;
  cfg.blocks = 2;
  ParamStore store;
  const TransformerDenoiser model(store, "m", cfg, rng);
  const NoiseSchedule schedule = linearSchedule(10, 0.02, 0.5);

  std::vector<DiffusionBatchItem> batch;
  for (int e = 0; e < 8; ++e) {
    const double sign = e % 2 == 0 ? 1.0 : -1.0;
    DiffusionBatchItem item;
    item.x0 = MatrixXd::Constant(1, 1, sign);
    const MatrixXd cond = MatrixXd::Constant(1, 1, sign);
    item.condition = [cond](const std::vector<VarPtr>&) { return constant(cond); };
    batch.push_back(std::move(item));
  }

  AdamConfig adam;
  adam.lr = 0.01;
  AdamState state;
  Rng trainRng = makeRng(2);
  for (int step = 0; step < 400; ++step) {
    diffusionTrainStep(model, store, schedule, batch, trainRng, adam, state);
  }

  const std::vector<VarPtr> leaves = constantLeaves(store);
  Rng sampleRng = makeRng(9);
  for (const double sign : {1.0, -1.0}) {
    const MatrixXd cond = MatrixXd::Constant(1, 1, sign);
    const DenoiseFn denoise = [&](const MatrixXd& x, int n) {
      return model.forward(leaves, constant(x), constant(cond), n)->value;
    };
    double mean = 0.0;
    for (int i = 0; i < 20; ++i) {
      mean += diffusionSample(denoise, schedule, 1, 1, sampleRng)(0, 0);
    }
    mean /= 20.0;
    CHECK(std::abs(mean - sign) < 0.1);
  }
}
