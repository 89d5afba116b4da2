#include "vmprox/model.hpp"

#include <cmath>

#include "vmprox/errors.hpp"

namespace vmprox {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void SmoothObjective::add_component_gradient_difference(std::size_t i,
                                                        const Vector& w,
                                                        const Vector& w_ref,
                                                        double scale,
                                                        Vector& out) const {
  Vector diff = Vector::Zero(w.size());
  add_component_gradient(i, w, 1.0, diff);
  add_component_gradient(i, w_ref, -1.0, diff);
  out.noalias() += scale * diff;
}

double SmoothObjective::value(const Vector& w) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < num_components(); ++i) acc += component_value(i, w);
  return acc / static_cast<double>(num_components());
}

Vector SmoothObjective::full_gradient(const Vector& w) const {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
  const double scale = 1.0 / static_cast<double>(num_components());
  for (std::size_t i = 0; i < num_components(); ++i) {
    add_component_gradient(i, w, scale, g);
  }
  return g;
}

Vector SmoothObjective::component_gradient(std::size_t i, const Vector& w) const {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
  add_component_gradient(i, w, 1.0, g);
  return g;
}

LogisticRidge::LogisticRidge(const Dataset& data, double lambda2)
    : data_(&data), lambda2_(lambda2) {
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) {
    throw ConfigError("lambda2 must be a finite nonnegative number");
  }
}

double LogisticRidge::loss_derivative(std::size_t i, const Vector& w) const {
  const double b = data_->label(i);
  return -b * sigmoid(-b * data_->row(i).dot(w));
}

double LogisticRidge::component_value(std::size_t i, const Vector& w) const {
  const double b = data_->label(i);
  return softplus(-b * data_->row(i).dot(w)) + 0.5 * lambda2_ * w.squaredNorm();
}

void LogisticRidge::add_component_gradient(std::size_t i, const Vector& w,
                                           double scale, Vector& out) const {
  data_->row(i).axpy(scale * loss_derivative(i, w), out);
  if (lambda2_ != 0.0) out.noalias() += (scale * lambda2_) * w;
}

void LogisticRidge::add_component_gradient_difference(std::size_t i,
                                                      const Vector& w,
                                                      const Vector& w_ref,
                                                      double scale,
                                                      Vector& out) const {
  const double coef = loss_derivative(i, w) - loss_derivative(i, w_ref);
  data_->row(i).axpy(scale * coef, out);
  if (lambda2_ != 0.0) out.noalias() += (scale * lambda2_) * (w - w_ref);
}

double LogisticRidge::value(const Vector& w) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < data_->n(); ++i) {
    acc += softplus(-data_->label(i) * data_->row(i).dot(w));
  }
  return acc / static_cast<double>(data_->n()) + 0.5 * lambda2_ * w.squaredNorm();
}

Vector LogisticRidge::full_gradient(const Vector& w) const {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(data_->d()));
  const double inv_n = 1.0 / static_cast<double>(data_->n());
  for (std::size_t i = 0; i < data_->n(); ++i) {
    data_->row(i).axpy(inv_n * loss_derivative(i, w), g);
  }
  if (lambda2_ != 0.0) g.noalias() += lambda2_ * w;
  return g;
}

SmoothnessProfile LogisticRidge::smoothness() const {
  return component_lipschitz(*data_, lambda2_);
}

Regularizer Regularizer::lasso(double lambda1) {
  if (!(lambda1 >= 0.0)) throw ConfigError("lambda1 must be nonnegative");
  return lambda1 == 0.0 ? zero() : Regularizer{Kind::L1, lambda1, 0.0};
}

Regularizer Regularizer::ridge(double lambda2) {
  if (!(lambda2 >= 0.0)) throw ConfigError("lambda2 must be nonnegative");
  return lambda2 == 0.0 ? zero() : Regularizer{Kind::L2, 0.0, lambda2};
}

Regularizer Regularizer::elastic_net(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw ConfigError("elastic-net weights must be nonnegative");
  }
  return Regularizer{Kind::ElasticNet, lambda1, lambda2};
}

double Regularizer::value(const Vector& w) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::L1: return l1 * w.lpNorm<1>();
    case Kind::L2: return 0.5 * l2 * w.squaredNorm();
    case Kind::ElasticNet: return l1 * w.lpNorm<1>() + 0.5 * l2 * w.squaredNorm();
  }
  return 0.0;
}

double Regularizer::prox_coordinate(double x, double u) const {
  const auto shrink = [](double v, double t) {
    const double a = std::abs(v) - t;
    return a > 0.0 ? std::copysign(a, v) : 0.0;
  };
  switch (kind) {
    case Kind::Zero: return x;
    case Kind::L1: return shrink(x, l1 * u);
    case Kind::L2: return x / (1.0 + l2 * u);
    case Kind::ElasticNet: return shrink(x, l1 * u) / (1.0 + l2 * u);
  }
  return x;
}

double Regularizer::subgradient_distance(double y, double g) const {
  // Subdifferential of l1|y| + (l2/2) y^2 is {l1 sign(y) + l2 y} off the
  // kink and [-l1, l1] at y = 0.
  const double smooth = (kind == Kind::L2 || kind == Kind::ElasticNet) ? l2 * y : 0.0;
  const double lam = (kind == Kind::L1 || kind == Kind::ElasticNet) ? l1 : 0.0;
  const double r = g - smooth;
  if (y != 0.0) return std::abs(r - std::copysign(lam, y));
  return std::max(0.0, std::abs(r) - lam);
}

std::string to_string(Regularizer::Kind kind) {
  switch (kind) {
    case Regularizer::Kind::Zero: return "zero";
    case Regularizer::Kind::L1: return "l1";
    case Regularizer::Kind::L2: return "l2";
    case Regularizer::Kind::ElasticNet: return "elastic-net";
  }
  return "unknown";
}

double objective(const SmoothObjective& smooth, const Regularizer& reg,
                 const Vector& w) {
  return smooth.value(w) + reg.value(w);
}

}  // namespace vmprox
