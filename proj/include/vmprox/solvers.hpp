#ifndef VMPROX_SOLVERS_HPP
#define VMPROX_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmprox/dataset.hpp"
#include "vmprox/metric.hpp"
#include "vmprox/model.hpp"
#include "vmprox/prox.hpp"
#include "vmprox/sampling.hpp"

namespace vmprox {

enum class Algorithm {
  VmMsrgbb,    ///< recursive estimator, diagonal BB metric, random t_k
  ProxSvrg,    ///< SVRG estimator, constant step, fixed m
  ProxSvrgBb,  ///< SVRG estimator, scalar BB step, fixed m
  Ms2gd,       ///< SVRG estimator, constant step, random t_k
  Ms2gdBb,     ///< SVRG estimator, scalar BB step, random t_k
  Msarah,      ///< recursive estimator, constant step, fixed m
  MsarahBb,    ///< recursive estimator, scalar BB step, fixed m
};

std::string to_string(Algorithm algorithm);
/// Accepts the display names ("VM-mSRGBB", "Prox-SVRG-BB", ...) case-insensitively.
Algorithm parse_algorithm(const std::string& name);
const std::vector<Algorithm>& all_algorithms();

enum class EstimatorKind { Recursive, Svrg };
enum class StepRule { Constant, ScalarBb, DiagonalBb };
enum class InnerLength { Default, RandomUniform, Fixed };

EstimatorKind estimator_of(Algorithm algorithm);
StepRule step_rule_of(Algorithm algorithm);
/// Resolves InnerLength::Default to the algorithm's canonical rule.
InnerLength inner_length_of(Algorithm algorithm, InnerLength requested);

std::string to_string(InnerLength rule);
InnerLength parse_inner_length(const std::string& name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::VmMsrgbb;
  int m = 1;
  int b = 1;
  int epochs = 1;
  double eta0 = 0.1;
  MetricConfig metric;  ///< metric.m is overwritten with `m` at run time
  SamplingScheme sampling = SamplingScheme::Uniform;
  std::uint64_t seed = 0;
  InnerLength inner = InnerLength::Default;
};

/// Throws ConfigError when an invariant fails for a problem with n components.
void validate(const SolverConfig& config, std::size_t n);

struct EpochRecord {
  int epoch = 0;  ///< number of completed epochs, starting at 1
  double passes = 0.0;
  double seconds = 0.0;
  double objective = 0.0;
  double gap = 0.0;
  double grad_map_norm = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int t_k = 0;
};

/// The iterate w_a kept by reservoir sampling together with the metric of
/// the epoch it came from.
struct OutputSample {
  Vector w;
  int epoch = 0;
  int t = 0;
  std::size_t index = 0;  ///< position among all inner iterates, 0-based
  DiagonalMetric metric;
};

struct RunTrace {
  std::vector<EpochRecord> epochs;
  Vector initial_iterate;
  Vector last_iterate;
  double initial_objective = 0.0;
  std::optional<OutputSample> sample;
  std::size_t total_inner_steps = 0;  ///< T = sum_k t_k
  std::size_t component_gradients = 0;
};

/// Keeps one uniformly chosen element of a stream in O(d) memory.
class ReservoirSampler {
 public:
  /// Offers the next element; it replaces the kept one with probability 1/count.
  void offer(const Vector& w, int epoch, int t, const DiagonalMetric& metric,
             RngStream& rng);
  std::size_t count() const { return count_; }
  const std::optional<OutputSample>& sample() const { return sample_; }

 private:
  std::size_t count_ = 0;
  std::optional<OutputSample> sample_;
};

/// Called after every inner step with w_{t-1}, w_t, w_{t+1} and v_t.
struct InnerStep {
  int epoch;
  int t;
  const Vector& w_prev;
  const Vector& w;
  const Vector& w_next;
  const Vector& v;
  const DiagonalMetric& metric;
};
using InnerObserver = std::function<void(const InnerStep&)>;

struct RunOptions {
  std::optional<double> reference_value;  ///< P_* for the gap column
  std::optional<Vector> initial_point;    ///< defaults to 0
  bool record_time = false;               ///< otherwise `seconds` stays 0
  InnerObserver observer;
  /// Abort when P(w~^k) exceeds this multiple of P(w~^0).
  double divergence_factor = 1e3;
};

/// v_t = (1/b) sum_{i in batch} (grad f_i(w_t) - grad f_i(w_prev)) / (q_i n) + v_prev
Vector srg_estimator_step(const SmoothObjective& smooth, const Vector& v_prev,
                          const Vector& w_t, const Vector& w_prev,
                          std::span<const std::size_t> batch,
                          const SamplingDistribution& dist);

/// v_t = (1/b) sum_{i in batch} (grad f_i(w_t) - grad f_i(w_anchor)) / (q_i n) + grad F(w_anchor)
Vector svrg_estimator_step(const SmoothObjective& smooth,
                           const Vector& full_grad_anchor,
                           const Vector& w_anchor, const Vector& w_t,
                           std::span<const std::size_t> batch,
                           const SamplingDistribution& dist);

/// Runs `config.epochs` outer epochs of the configured method on P = F + R.
RunTrace run(const SolverConfig& config, const SmoothObjective& smooth,
             const Regularizer& reg, const RunOptions& options = {});

/// The reservoir-sampled output iterate w_a. Throws Error if no inner step ran.
const Vector& select_output(const RunTrace& trace);

}  // namespace vmprox

#endif  // VMPROX_SOLVERS_HPP
