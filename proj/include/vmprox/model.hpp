#ifndef VMPROX_MODEL_HPP
#define VMPROX_MODEL_HPP

#include <cstddef>
#include <string>

#include "vmprox/dataset.hpp"

namespace vmprox {

/// Smooth part F(w) = (1/n) sum_i f_i(w) of a composite objective.
///
/// Solvers only touch F through this interface so that tests can drive them
/// with analytic losses. Implementations must be pure and reentrant.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual std::size_t num_components() const = 0;
  virtual std::size_t dim() const = 0;

  virtual double component_value(std::size_t i, const Vector& w) const = 0;
  /// out += scale * grad f_i(w)
  virtual void add_component_gradient(std::size_t i, const Vector& w,
                                      double scale, Vector& out) const = 0;
  /// out += scale * (grad f_i(w) - grad f_i(w_ref))
  virtual void add_component_gradient_difference(std::size_t i, const Vector& w,
                                                 const Vector& w_ref,
                                                 double scale,
                                                 Vector& out) const;

  /// F(w)
  virtual double value(const Vector& w) const;
  /// grad F(w), summed in fixed index order
  virtual Vector full_gradient(const Vector& w) const;

  virtual SmoothnessProfile smoothness() const = 0;

  Vector component_gradient(std::size_t i, const Vector& w) const;
};

/// f_i(w) = log(1 + exp(-b_i a_i^T w)) + (lambda2 / 2) ||w||^2.
class LogisticRidge final : public SmoothObjective {
 public:
  /// `data` must outlive this object.
  LogisticRidge(const Dataset& data, double lambda2);

  const Dataset& data() const { return *data_; }
  double lambda2() const { return lambda2_; }

  std::size_t num_components() const override { return data_->n(); }
  std::size_t dim() const override { return data_->d(); }

  double component_value(std::size_t i, const Vector& w) const override;
  void add_component_gradient(std::size_t i, const Vector& w, double scale,
                              Vector& out) const override;
  void add_component_gradient_difference(std::size_t i, const Vector& w,
                                         const Vector& w_ref, double scale,
                                         Vector& out) const override;
  double value(const Vector& w) const override;
  Vector full_gradient(const Vector& w) const override;
  SmoothnessProfile smoothness() const override;

  /// d/dz log(1 + exp(-b z)) at z = a_i^T w, i.e. -b_i sigmoid(-b_i a_i^T w).
  double loss_derivative(std::size_t i, const Vector& w) const;

 private:
  const Dataset* data_;
  double lambda2_;
};

/// Separable, proxable regularizer R(w).
struct Regularizer {
  enum class Kind { Zero, L1, L2, ElasticNet };

  Kind kind = Kind::Zero;
  double l1 = 0.0;  ///< weight on ||w||_1
  double l2 = 0.0;  ///< weight on (1/2)||w||_2^2

  static Regularizer zero() { return {}; }
  static Regularizer lasso(double lambda1);
  static Regularizer ridge(double lambda2);
  static Regularizer elastic_net(double lambda1, double lambda2);

  double value(const Vector& w) const;
  /// argmin_y (y - x)^2 / (2u) + R_scalar(y); ties at |x| = l1 u give exactly 0.
  double prox_coordinate(double x, double u) const;
  /// Distance from g to the subdifferential of the scalar regularizer at y.
  double subgradient_distance(double y, double g) const;
};

std::string to_string(Regularizer::Kind kind);

/// P(w) = F(w) + R(w).
double objective(const SmoothObjective& smooth, const Regularizer& reg,
                 const Vector& w);

/// Numerically stable log(1 + exp(x)).
double softplus(double x);
/// Numerically stable 1 / (1 + exp(-x)).
double sigmoid(double x);

}  // namespace vmprox

#endif  // VMPROX_MODEL_HPP
