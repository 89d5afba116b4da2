#ifndef VMPROX_DIAGNOSTICS_HPP
#define VMPROX_DIAGNOSTICS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "vmprox/model.hpp"
#include "vmprox/prox.hpp"
#include "vmprox/sampling.hpp"
#include "vmprox/solvers.hpp"

namespace vmprox {

/// G_{U^{-1}}(w) = U^{-1}(w - prox_R^{U^{-1}}(w - U grad F(w))).
Vector gradient_mapping(const Vector& w, const DiagonalMetric& metric,
                        const SmoothObjective& smooth, const Regularizer& reg);
/// Same, reusing an already computed grad F(w).
Vector gradient_mapping(const Vector& w, const Vector& grad,
                        const DiagonalMetric& metric, const Regularizer& reg);

/// Floor applied to reported optimality gaps so log plots stay finite.
inline constexpr double kGapFloor = 1e-16;
double optimality_gap(double value, double reference);

struct ReferenceOptions {
  double tol = 1e-13;                  ///< target ||G_{L_Omega I}(w)||_2
  std::size_t max_iterations = 200000; ///< proximal-gradient budget per phase
  int polish_epochs = 30;              ///< Prox-SVRG epochs between phases
  std::uint64_t seed = 0x5eed;
};

struct ReferenceSolution {
  Vector w;
  double value = 0.0;
  double residual = 0.0;  ///< ||G_{L_Omega I}(w)||_2 at w
  std::size_t iterations = 0;
  bool polished = false;
};

/// High-accuracy minimizer of P: proximal gradient with stepsize 1/L_Omega
/// (uniform sampling constant); if that stalls within the budget, a long
/// Prox-SVRG polish followed by a second proximal-gradient phase. Throws
/// MaxIterationsError if the tolerance is still not certified.
ReferenceSolution compute_reference(const SmoothObjective& smooth,
                                    const Regularizer& reg,
                                    const ReferenceOptions& options = {});

enum class RateMode { StronglyConvex, QuadraticGrowth };

struct RateInputs {
  double modulus = 0.0;  ///< mu (strongly convex) or nu (quadratic growth)
  double l_omega = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  int m = 1;
  int b = 1;
};

struct RateResult {
  double value = 0.0;
  bool contraction = false;  ///< value < 1
};

/// rho = 1 / (m mod u_min (1 - 8 L u_max / b)) + 4 L u_max / (m b (1 - 8 L u_max / b)).
/// The quadratic-growth constant has the same form with nu in place of mu.
/// Throws RateHypothesisError unless 8 L_Omega u_max / b < 1.
RateResult theoretical_rate(const RateInputs& inputs,
                            RateMode mode = RateMode::StronglyConvex);

/// Inner-loop contraction 1 - mu_F^2 u_min (2 / L_Omega - u_max) for
/// strongly convex F; requires u_max <= 2 / L_Omega.
double inner_loop_contraction(double mu_f, double l_omega, double u_min,
                              double u_max);

/// Certified strong-convexity modulus when nothing better is known: the ridge
/// weight in F plus any l2 weight in R.
double default_modulus(double smooth_lambda2, const Regularizer& reg);

/// One seeded run's contribution to the convex-case bound.
struct ConvexBoundSample {
  double grad_map_sq = 0.0;  ///< ||G_{U_k^{-1}}(w_a)||^2_{U_k}
  std::size_t total_steps = 0;  ///< T of that run
  double u_max = 0.0;           ///< largest stepsize used in the run
};

struct ConvexBoundReport {
  std::size_t runs = 0;
  /// Mean and standard error of T * ||G||^2; equals T times the plain mean
  /// when every run has the same T.
  double scaled_mean = 0.0;
  double scaled_std_error = 0.0;
  double mean = 0.0;       ///< plain mean of ||G||^2
  double std_error = 0.0;  ///< standard error of the plain mean
  double bound = 0.0;      ///< 6 (P(w~^0) - P_*) / T (harmonic T if T varies)
  bool constant_horizon = true;
  bool hypothesis_ok = true;  ///< every u_max <= 1 / (3 L_Omega)
  bool pass = false;          ///< scaled_mean <= 6 gap + 2 scaled_std_error
  double margin = 0.0;        ///< 6 gap + 2 se - scaled_mean
};

ConvexBoundReport convex_bound_check(std::span<const ConvexBoundSample> samples,
                                     double initial_gap, double l_omega);

enum class ExpectationMode { Exact, MonteCarlo };

struct VarianceCheckInput {
  const SmoothObjective* smooth = nullptr;
  Regularizer reg;
  DiagonalMetric metric = DiagonalMetric::scalar(1, 1.0);
  Vector start;  ///< w~ = w_0 = w_1
  std::size_t b = 1;
  int t = 1;     ///< inner index at which the moments are taken
  const SamplingDistribution* dist = nullptr;
  ExpectationMode mode = ExpectationMode::Exact;
  std::size_t samples = 100000;  ///< Monte-Carlo only
  std::uint64_t seed = 1;
  std::optional<double> reference_value;  ///< enables the P-based bound
};

struct VarianceReport {
  double variance = 0.0;      ///< E||v_t - grad F(w_t)||^2
  double step_sq = 0.0;       ///< E||w_t - w_{t-1}||^2
  double bound_lipschitz = 0.0;  ///< (L_Omega^2 / b) E||w_t - w_{t-1}||^2
  double margin_lipschitz = 0.0;
  std::optional<double> bound_objective;  ///< (4 L_Omega / b) E[gap_t + gap_{t-1}]
  std::optional<double> margin_objective;
  Vector mean_v;     ///< E[v_t]
  Vector mean_grad;  ///< E[grad F(w_t)]
  std::size_t paths = 0;
};

/// Moments of the recursive estimator after t inner steps of the actual
/// solver update, by full enumeration of mini-batch sequences or by
/// Monte-Carlo.
VarianceReport estimator_variance_check(const VarianceCheckInput& input);

}  // namespace vmprox

#endif  // VMPROX_DIAGNOSTICS_HPP
