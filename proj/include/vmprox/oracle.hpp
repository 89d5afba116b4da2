#ifndef VMPROX_ORACLE_HPP
#define VMPROX_ORACLE_HPP

// Brute-force reference computations used to certify the core library.
// Nothing here calls into the prox, metric or solver code; the only shared
// pieces are the Dataset/SmoothObjective types.

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "vmprox/dataset.hpp"
#include "vmprox/model.hpp"

namespace vmprox::oracle {

using Matrix = Eigen::MatrixXd;

enum class Loss { Logistic, Squared };

/// Dense problem small enough for exhaustive enumeration (n <= 8, d <= 4).
struct TinyInstance {
  Matrix features;  ///< n x d, row i is a_i
  Vector labels;    ///< b_i
  Loss loss = Loss::Logistic;
  double ridge = 0.0;  ///< (ridge / 2)||w||^2 inside every f_i
  double l1 = 0.0;     ///< R(w) = l1 ||w||_1

  std::size_t n() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(features.cols()); }

  double component_value(std::size_t i, const Vector& w) const;
  Vector component_gradient(std::size_t i, const Vector& w) const;
  double smooth_value(const Vector& w) const;
  Vector full_gradient(const Vector& w) const;
  double objective(const Vector& w) const;
  double component_lipschitz(std::size_t i) const;
};

/// Random instance with entries N(0,1), labels +-1 (logistic) or N(0,1)
/// responses (squared).
TinyInstance make_tiny_instance(std::size_t n, std::size_t d, Loss loss,
                                double ridge, double l1, std::uint64_t seed);

/// Adapter so solvers can run on a TinyInstance (e.g. with squared loss).
class TinySmooth final : public SmoothObjective {
 public:
  explicit TinySmooth(TinyInstance instance) : inst_(std::move(instance)) {}
  const TinyInstance& instance() const { return inst_; }

  std::size_t num_components() const override { return inst_.n(); }
  std::size_t dim() const override { return inst_.d(); }
  double component_value(std::size_t i, const Vector& w) const override;
  void add_component_gradient(std::size_t i, const Vector& w, double scale,
                              Vector& out) const override;
  SmoothnessProfile smoothness() const override;

 private:
  TinyInstance inst_;
};

/// Dense logistic data in LIBSVM form: rows a_i ~ N(0, I_d) scaled to unit
/// norm (optional), labels from a planted separator with 10% flips.
struct SyntheticOptions {
  bool unit_rows = true;
  double label_noise = 0.1;
};
Dataset make_synthetic_classification(std::size_t n, std::size_t d,
                                      std::uint64_t seed,
                                      const SyntheticOptions& options = {});

/// Dense view of a Dataset as a TinyInstance-style matrix.
Matrix dense_features(const Dataset& ds);

/// Central differences (f(w + h e_i) - f(w - h e_i)) / 2h.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& w, double h);

/// argmin_y (y - w)^2 / (2u) + l1|y| + (l2/2) y^2 by golden-section search on
/// [w - 10(1 + |w|), w + 10(1 + |w|)] to 1e-10, with an exact test of the
/// kink at y = 0.
double prox_1d_oracle(double w, double u, double l1, double l2 = 0.0);

/// argmin over u in [lower, upper] of (s - u y)^2 + omega (u - u_prev)^2 by
/// successively refined grid search.
double metric_coordinate_oracle(double s, double y, double u_prev, double omega,
                                double lower, double upper);

enum class Estimator { Recursive, Svrg };

struct EnumerationInput {
  const TinyInstance* instance = nullptr;
  Estimator estimator = Estimator::Recursive;
  int depth = 1;      ///< t at which moments are taken
  std::size_t b = 1;
  Vector q;           ///< sampling probabilities
  Vector u;           ///< diagonal stepsizes
  Vector start;       ///< w~ (defaults to 0 when empty)
};

struct Moments {
  Vector mean_v;          ///< E[v_t]
  Vector mean_grad;       ///< E[grad F(w_t)]
  double variance = 0.0;  ///< E||v_t - grad F(w_t)||^2
  double step_sq = 0.0;   ///< E||w_t - w_{t-1}||^2
  double next_step_metric_sq = 0.0;  ///< E||w_{t+1} - w_t||^2_{U^{-1}}
  std::size_t paths = 0;
  /// Monte-Carlo only: standard errors of mean_v entries and of variance.
  Vector mean_v_se;
  double variance_se = 0.0;
};

/// Exact moments over every mini-batch sequence, weighted by prod q_i.
/// Throws PathExplosionError beyond 1e6 paths.
Moments enumerate_expectation(const EnumerationInput& input);

/// Same quantities estimated from `samples` simulated paths.
Moments monte_carlo_expectation(const EnumerationInput& input,
                                std::size_t samples, std::uint64_t seed);

/// L_Omega = max_i L_i / (n q_i) for a tiny instance.
double tiny_l_omega(const TinyInstance& instance, const Vector& q);

/// Minimizer of (1/n) sum log(1 + exp(-b_i a_i w)) + (l2/2) w^2 + l1 |w| over
/// scalar w, by bisection on the optimality condition.
double logistic_1d_minimizer(const Vector& a, const Vector& b, double l2,
                             double l1);

}  // namespace vmprox::oracle

#endif  // VMPROX_ORACLE_HPP
