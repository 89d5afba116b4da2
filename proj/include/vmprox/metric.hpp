#ifndef VMPROX_METRIC_HPP
#define VMPROX_METRIC_HPP

#include <limits>

#include "vmprox/dataset.hpp"
#include "vmprox/prox.hpp"

namespace vmprox {

/// s = w~^k - w~^{k-1}, y = grad F(w~^k) - grad F(w~^{k-1}).
struct SecantPair {
  Vector s;
  Vector y;
};

struct MetricConfig {
  double omega = 1.0;          ///< weight pulling U_k toward U_{k-1}
  int m = 1;                   ///< inner-loop cap used by the 1/m scaling
  double floor = 1e-12;        ///< smallest stepsize ever emitted
  /// Largest stepsize ever emitted. Infinite by default; set it to keep
  /// U below a multiple of 1/L_Omega, as the convergence guarantees assume.
  double cap = std::numeric_limits<double>::infinity();
};

/// Upper (alpha^1) and lower (alpha^2) Barzilai-Borwein bounds.
struct BbBounds {
  double upper;  ///< (2/m) ||s|| / ||y||
  double lower;  ///< (1/m) s^T y / ||y||^2
};

/// Throws DegeneratePairError when y = 0 and NonpositiveCurvatureError when
/// s^T y <= 0.
BbBounds bb_bounds(const SecantPair& pair, int m);

/// Closed-form minimizer of ||s - U y||^2 + omega ||U - U_prev||_F^2 over
/// diagonal U with lower <= u_i <= upper:
///   u_i = clip((s_i y_i + omega u_prev_i) / (y_i^2 + omega), lower, upper).
DiagonalMetric diagonal_bb_update(const SecantPair& pair, const Vector& u_prev,
                                  const MetricConfig& config, double upper,
                                  double lower);

/// bb_bounds followed by diagonal_bb_update, with the box pushed inside
/// [floor, cap]. Degenerate pairs return `prev` unchanged.
DiagonalMetric update_metric(const SecantPair& pair, const DiagonalMetric& prev,
                             const MetricConfig& config);

/// Scalar BB stepsize eta_k = (1/m) s^T y / ||y||^2 clamped to
/// [floor, cap]; returns `prev` on degenerate pairs.
double scalar_bb_stepsize(const SecantPair& pair, double prev,
                          const MetricConfig& config);

/// Value of ||s - Diag(u) y||^2 + omega ||Diag(u) - Diag(u_prev)||_F^2.
double secant_objective(const SecantPair& pair, const Vector& u,
                        const Vector& u_prev, double omega);

}  // namespace vmprox

#endif  // VMPROX_METRIC_HPP
