#include "vmprox/metric.hpp"

#include <algorithm>
#include <cmath>

#include "vmprox/errors.hpp"

namespace vmprox {

BbBounds bb_bounds(const SecantPair& pair, int m) {
  if (m < 1) throw ConfigError("m must be >= 1");
  const double yy = pair.y.squaredNorm();
  if (!(yy > 0.0)) throw DegeneratePairError();
  const double sy = pair.s.dot(pair.y);
  if (!(sy > 0.0)) throw NonpositiveCurvatureError();
  const double inv_m = 1.0 / static_cast<double>(m);
  BbBounds b{2.0 * inv_m * pair.s.norm() / std::sqrt(yy), inv_m * sy / yy};
  // Cauchy-Schwarz gives lower <= upper / 2 in exact arithmetic.
  b.lower = std::min(b.lower, b.upper);
  return b;
}

DiagonalMetric diagonal_bb_update(const SecantPair& pair, const Vector& u_prev,
                                  const MetricConfig& config, double upper,
                                  double lower) {
  if (!(config.omega > 0.0)) throw ConfigError("omega must be positive");
  if (!(lower > 0.0) || !(lower <= upper)) {
    throw MetricError("BB bounds must satisfy 0 < alpha2 <= alpha1");
  }
  Vector u(u_prev.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double s = pair.s[i];
    const double y = pair.y[i];
    const double raw = (s * y + config.omega * u_prev[i]) / (y * y + config.omega);
    u[i] = std::clamp(raw, lower, upper);
  }
  return DiagonalMetric(std::move(u), lower, upper);
}

DiagonalMetric update_metric(const SecantPair& pair, const DiagonalMetric& prev,
                             const MetricConfig& config) {
  BbBounds b{};
  try {
    b = bb_bounds(pair, config.m);
  } catch (const DegeneratePairError&) {
    return prev;
  } catch (const NonpositiveCurvatureError&) {
    return prev;
  }
  const double lower = std::clamp(b.lower, config.floor, config.cap);
  const double upper = std::clamp(b.upper, lower, config.cap);
  return diagonal_bb_update(pair, prev.u(), config, upper, lower);
}

double scalar_bb_stepsize(const SecantPair& pair, double prev,
                          const MetricConfig& config) {
  try {
    return std::clamp(bb_bounds(pair, config.m).lower, config.floor, config.cap);
  } catch (const DegeneratePairError&) {
    return prev;
  } catch (const NonpositiveCurvatureError&) {
    return prev;
  }
}

double secant_objective(const SecantPair& pair, const Vector& u,
                        const Vector& u_prev, double omega) {
  return (pair.s - u.cwiseProduct(pair.y)).squaredNorm() +
         omega * (u - u_prev).squaredNorm();
}

}  // namespace vmprox
