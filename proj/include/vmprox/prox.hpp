#ifndef VMPROX_PROX_HPP
#define VMPROX_PROX_HPP

#include "vmprox/dataset.hpp"
#include "vmprox/model.hpp"

namespace vmprox {

/// U = Diag(u) with lower <= u_i <= upper and lower > 0.
///
/// In the BB-driven solvers `lower` and `upper` are the bounds alpha^2 and
/// alpha^1 the coordinates were clipped to.
class DiagonalMetric {
 public:
  /// Throws MetricError unless 0 < lower <= u_i <= upper and all finite.
  DiagonalMetric(Vector u, double lower, double upper);
  /// Bounds taken as min/max of u.
  explicit DiagonalMetric(Vector u);

  static DiagonalMetric scalar(std::size_t d, double eta);

  const Vector& u() const { return u_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double min() const { return u_.minCoeff(); }
  double max() const { return u_.maxCoeff(); }
  std::size_t size() const { return static_cast<std::size_t>(u_.size()); }

  /// ||v||_U^2 = sum u_i v_i^2
  double norm_sq(const Vector& v) const;
  /// ||v||_{U^{-1}}^2 = sum v_i^2 / u_i
  double inverse_norm_sq(const Vector& v) const;

 private:
  Vector u_;
  double lower_;
  double upper_;
};

/// prox_R^{U^{-1}}(w) = argmin_y (1/2)||y - w||^2_{U^{-1}} + R(y).
Vector scaled_prox(const Regularizer& reg, const DiagonalMetric& metric,
                   const Vector& w);
/// Same, with raw stepsizes; throws MetricError if any u_i <= 0.
Vector scaled_prox(const Regularizer& reg, const Vector& u, const Vector& w);

/// out = prox_R^{U^{-1}}(x - U g). Hot-loop form used by the solvers.
void prox_gradient_step(const Regularizer& reg, const DiagonalMetric& metric,
                        const Vector& x, const Vector& g, Vector& out);

/// Euclidean distance from U^{-1}(w - y) to the subdifferential of R at y.
/// Zero exactly when y = scaled_prox(reg, U, w).
double prox_optimality_residual(const Regularizer& reg,
                                const DiagonalMetric& metric, const Vector& w,
                                const Vector& y);

}  // namespace vmprox

#endif  // VMPROX_PROX_HPP
