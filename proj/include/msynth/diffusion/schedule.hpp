#pragma once

#include "msynth/common.hpp"

namespace msynth {

/// Fixed variance schedule for the forward noising chain. Entry i holds the
/// value for step n = i + 1; alphaBarAt(0) is defined as 1.
struct NoiseSchedule {
  VectorXd beta;
  VectorXd alpha;     // 1 - beta
  VectorXd alphaBar;  // running product of alpha
  bool posteriorVariance = false;  // sigma^2 = beta-tilde instead of beta

  int steps() const { return static_cast<int>(beta.size()); }
  double betaAt(int n) const { return beta(n - 1); }
  double alphaAt(int n) const { return alpha(n - 1); }
  double alphaBarAt(int n) const { return n == 0 ? 1.0 : alphaBar(n - 1); }

  /// Reverse-step noise variance at level n (beta by default; the posterior
  /// variance (1 - abar_{n-1}) / (1 - abar_n) * beta when switched on).
  double sigma2(int n) const;

  void validate() const;  // throws ConfigError
};

NoiseSchedule scheduleFromBetas(VectorXd beta);
/// beta interpolated linearly from betaStart at n=1 to betaEnd at n=N.
NoiseSchedule linearSchedule(int n, double betaStart = 1e-4, double betaEnd = 0.02);
/// Cosine-shaped alphaBar with the usual small offset; betas clipped below 0.999.
NoiseSchedule cosineSchedule(int n, double offset = 0.008);

}  // namespace msynth
