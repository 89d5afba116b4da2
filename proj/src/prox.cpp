#include "vmprox/prox.hpp"

#include <cmath>

#include "vmprox/errors.hpp"

namespace vmprox {

DiagonalMetric::DiagonalMetric(Vector u, double lower, double upper)
    : u_(std::move(u)), lower_(lower), upper_(upper) {
  if (u_.size() == 0) throw MetricError("metric has dimension 0");
  if (!(lower_ > 0.0) || !std::isfinite(upper_) || !(lower_ <= upper_)) {
    throw MetricError("metric bounds must satisfy 0 < lower <= upper < inf");
  }
  for (Eigen::Index i = 0; i < u_.size(); ++i) {
    if (!(u_[i] > 0.0) || !std::isfinite(u_[i])) {
      throw MetricError("metric entry " + std::to_string(i) + " is not positive and finite");
    }
    if (u_[i] < lower_ || u_[i] > upper_) {
      throw MetricError("metric entry " + std::to_string(i) + " outside [lower, upper]");
    }
  }
}

DiagonalMetric::DiagonalMetric(Vector u)
    : DiagonalMetric(u, u.size() ? u.minCoeff() : 0.0, u.size() ? u.maxCoeff() : 0.0) {}

DiagonalMetric DiagonalMetric::scalar(std::size_t d, double eta) {
  return DiagonalMetric(Vector::Constant(static_cast<Eigen::Index>(d), eta), eta, eta);
}

double DiagonalMetric::norm_sq(const Vector& v) const {
  return (u_.array() * v.array().square()).sum();
}

double DiagonalMetric::inverse_norm_sq(const Vector& v) const {
  return (v.array().square() / u_.array()).sum();
}

Vector scaled_prox(const Regularizer& reg, const DiagonalMetric& metric,
                   const Vector& w) {
  Vector y(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    y[i] = reg.prox_coordinate(w[i], metric.u()[i]);
  }
  return y;
}

Vector scaled_prox(const Regularizer& reg, const Vector& u, const Vector& w) {
  if (u.size() != w.size()) throw MetricError("metric and point dimensions differ");
  return scaled_prox(reg, DiagonalMetric(u), w);
}

void prox_gradient_step(const Regularizer& reg, const DiagonalMetric& metric,
                        const Vector& x, const Vector& g, Vector& out) {
  const Vector& u = metric.u();
  out.resize(x.size());
  if (reg.kind == Regularizer::Kind::Zero) {
    out = x - u.cwiseProduct(g);
    return;
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = reg.prox_coordinate(x[i] - u[i] * g[i], u[i]);
  }
}

double prox_optimality_residual(const Regularizer& reg,
                                const DiagonalMetric& metric, const Vector& w,
                                const Vector& y) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double g = (w[i] - y[i]) / metric.u()[i];
    const double r = reg.subgradient_distance(y[i], g);
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace vmprox
