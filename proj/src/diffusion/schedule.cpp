#include "msynth/diffusion/schedule.hpp"

#include <cmath>
#include <numbers>

namespace msynth {

double NoiseSchedule::sigma2(int n) const {
  if (n < 1 || n > steps()) throw std::out_of_range("NoiseSchedule::sigma2: n out of range");
  if (!posteriorVariance) return betaAt(n);
  return (1.0 - alphaBarAt(n - 1)) / (1.0 - alphaBarAt(n)) * betaAt(n);
}

void NoiseSchedule::validate() const {
  const int n = steps();
  if (n < 1) throw ConfigError("NoiseSchedule: needs at least one step");
  if (alpha.size() != n || alphaBar.size() != n) {
    throw ConfigError("NoiseSchedule: derived arrays out of sync");
  }
  double product = 1.0;
  for (int i = 0; i < n; ++i) {
    if (!(beta(i) > 0.0 && beta(i) < 1.0)) {
      throw ConfigError("NoiseSchedule: beta must lie in (0, 1)");
    }
    if (std::abs(alpha(i) - (1.0 - beta(i))) > 1e-15) {
      throw ConfigError("NoiseSchedule: alpha != 1 - beta");
    }
    product *= alpha(i);
    if (std::abs(alphaBar(i) - product) > 1e-12) {
      throw ConfigError("NoiseSchedule: alphaBar is not the alpha product");
    }
    if (i > 0 && !(alphaBar(i) < alphaBar(i - 1))) {
      throw ConfigError("NoiseSchedule: alphaBar must strictly decrease");
    }
  }
}

NoiseSchedule scheduleFromBetas(VectorXd beta) {
  NoiseSchedule s;
  s.beta = std::move(beta);
  s.alpha = 1.0 - s.beta.array();
  s.alphaBar.resize(s.beta.size());
  double product = 1.0;
  for (Eigen::Index i = 0; i < s.beta.size(); ++i) {
    product *= s.alpha(i);
    s.alphaBar(i) = product;
  }
  return s;
}

NoiseSchedule linearSchedule(int n, double betaStart, double betaEnd) {
  if (n < 1) throw ConfigError("linearSchedule: needs at least one step");
  VectorXd beta(n);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    beta(i) = betaStart + t * (betaEnd - betaStart);
  }
  NoiseSchedule s = scheduleFromBetas(std::move(beta));
  s.validate();
  return s;
}

NoiseSchedule cosineSchedule(int n, double offset) {
  if (n < 1) throw ConfigError("cosineSchedule: needs at least one step");
  const auto f = [&](double step) {
    const double v = (step / n + offset) / (1.0 + offset) * std::numbers::pi / 2.0;
    return std::cos(v) * std::cos(v);
  };
  VectorXd beta(n);
  double prevBar = 1.0;
  for (int i = 0; i < n; ++i) {
    const double bar = f(i + 1) / f(0);
    beta(i) = std::min(1.0 - bar / prevBar, 0.999);
    prevBar = bar;
  }
  NoiseSchedule s = scheduleFromBetas(std::move(beta));
  s.validate();
  return s;
}

}  // namespace msynth
