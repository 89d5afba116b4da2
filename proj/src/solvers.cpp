#include "vmprox/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

#include "vmprox/diagnostics.hpp"
#include "vmprox/errors.hpp"

namespace vmprox {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::VmMsrgbb: return "VM-mSRGBB";
    case Algorithm::ProxSvrg: return "Prox-SVRG";
    case Algorithm::ProxSvrgBb: return "Prox-SVRG-BB";
    case Algorithm::Ms2gd: return "mS2GD";
    case Algorithm::Ms2gdBb: return "mS2GD-BB";
    case Algorithm::Msarah: return "mSARAH";
    case Algorithm::MsarahBb: return "mSARAH-BB";
  }
  return "unknown";
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{
      Algorithm::VmMsrgbb, Algorithm::ProxSvrg, Algorithm::ProxSvrgBb,
      Algorithm::Ms2gd,    Algorithm::Ms2gdBb,  Algorithm::Msarah,
      Algorithm::MsarahBb};
  return all;
}

Algorithm parse_algorithm(const std::string& name) {
  const auto key = lower(name);
  for (auto a : all_algorithms()) {
    if (lower(to_string(a)) == key) return a;
  }
  throw ConfigError("unknown algorithm '" + name + "'");
}

EstimatorKind estimator_of(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::VmMsrgbb:
    case Algorithm::Msarah:
    case Algorithm::MsarahBb: return EstimatorKind::Recursive;
    default: return EstimatorKind::Svrg;
  }
}

StepRule step_rule_of(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::VmMsrgbb: return StepRule::DiagonalBb;
    case Algorithm::ProxSvrgBb:
    case Algorithm::Ms2gdBb:
    case Algorithm::MsarahBb: return StepRule::ScalarBb;
    default: return StepRule::Constant;
  }
}

InnerLength inner_length_of(Algorithm algorithm, InnerLength requested) {
  if (requested != InnerLength::Default) return requested;
  switch (algorithm) {
    case Algorithm::VmMsrgbb:
    case Algorithm::Ms2gd:
    case Algorithm::Ms2gdBb: return InnerLength::RandomUniform;
    default: return InnerLength::Fixed;
  }
}

std::string to_string(InnerLength rule) {
  switch (rule) {
    case InnerLength::Default: return "default";
    case InnerLength::RandomUniform: return "random";
    case InnerLength::Fixed: return "fixed";
  }
  return "unknown";
}

InnerLength parse_inner_length(const std::string& name) {
  const auto key = lower(name);
  if (key == "default") return InnerLength::Default;
  if (key == "random") return InnerLength::RandomUniform;
  if (key == "fixed") return InnerLength::Fixed;
  throw ConfigError("unknown inner-length rule '" + name + "'");
}

void validate(const SolverConfig& config, std::size_t n) {
  if (config.m < 1) throw ConfigError("m must be >= 1");
  if (config.b < 1 || static_cast<std::size_t>(config.b) > n) {
    throw ConfigError("mini-batch size b must satisfy 1 <= b <= n = " + std::to_string(n));
  }
  if (config.epochs < 1) throw ConfigError("number of epochs K must be >= 1");
  if (!(config.eta0 > 0.0) || !std::isfinite(config.eta0)) {
    throw ConfigError("eta0 must be positive and finite");
  }
  if (!(config.metric.omega > 0.0) || !std::isfinite(config.metric.omega)) {
    throw ConfigError("omega must be positive and finite");
  }
  if (!(config.metric.floor > 0.0)) throw ConfigError("stepsize floor must be positive");
  if (!(config.metric.cap >= config.metric.floor)) {
    throw ConfigError("stepsize cap must be >= the floor");
  }
}

void ReservoirSampler::offer(const Vector& w, int epoch, int t,
                             const DiagonalMetric& metric, RngStream& rng) {
  ++count_;
  if (rng.uniform_index(count_) == 0) {
    sample_ = OutputSample{w, epoch, t, count_ - 1, metric};
  }
}

namespace {

void add_batch_difference(const SmoothObjective& smooth,
                          std::span<const std::size_t> batch,
                          const SamplingDistribution& dist, const Vector& w,
                          const Vector& w_ref, Vector& out) {
  const double b = static_cast<double>(batch.size());
  const double n = static_cast<double>(dist.size());
  for (auto i : batch) {
    smooth.add_component_gradient_difference(i, w, w_ref, 1.0 / (b * dist.q()[i] * n), out);
  }
}

}  // namespace

Vector srg_estimator_step(const SmoothObjective& smooth, const Vector& v_prev,
                          const Vector& w_t, const Vector& w_prev,
                          std::span<const std::size_t> batch,
                          const SamplingDistribution& dist) {
  Vector v = v_prev;
  add_batch_difference(smooth, batch, dist, w_t, w_prev, v);
  return v;
}

Vector svrg_estimator_step(const SmoothObjective& smooth,
                           const Vector& full_grad_anchor,
                           const Vector& w_anchor, const Vector& w_t,
                           std::span<const std::size_t> batch,
                           const SamplingDistribution& dist) {
  Vector v = full_grad_anchor;
  add_batch_difference(smooth, batch, dist, w_t, w_anchor, v);
  return v;
}

RunTrace run(const SolverConfig& config_in, const SmoothObjective& smooth,
             const Regularizer& reg, const RunOptions& options) {
  const std::size_t n = smooth.num_components();
  const std::size_t d = smooth.dim();
  validate(config_in, n);
  SolverConfig config = config_in;
  config.metric.m = config.m;

  const auto dist = build_distribution(smooth.smoothness(), config.sampling);
  const auto estimator = estimator_of(config.algorithm);
  const auto step_rule = step_rule_of(config.algorithm);
  const auto inner_rule = inner_length_of(config.algorithm, config.inner);

  RngStream rng(derive_seed(config.seed, 0));
  RngStream reservoir_rng(derive_seed(config.seed, 1));
  ReservoirSampler reservoir;

  const auto clock_start = std::chrono::steady_clock::now();
  const double dn = static_cast<double>(n);

  RunTrace trace;
  Vector w_tilde = options.initial_point ? *options.initial_point
                                         : Vector::Zero(static_cast<Eigen::Index>(d));
  if (static_cast<std::size_t>(w_tilde.size()) != d) {
    throw ConfigError("initial point has the wrong dimension");
  }
  trace.initial_iterate = w_tilde;
  trace.initial_objective = objective(smooth, reg, w_tilde);
  const double divergence_limit =
      trace.initial_objective > 0.0 ? options.divergence_factor * trace.initial_objective
                                    : std::numeric_limits<double>::infinity();

  Vector grad = smooth.full_gradient(w_tilde);
  Vector w_tilde_prev, grad_prev;
  const double eta0 = std::min(config.eta0, config.metric.cap);
  DiagonalMetric metric = DiagonalMetric::scalar(d, eta0);

  double passes = 0.0;
  std::vector<std::size_t> batch;
  Vector w_prev(d), w_cur(d), w_next(d), v(d);

  for (int k = 0; k < config.epochs; ++k) {
    if (k > 0) {
      const SecantPair pair{w_tilde - w_tilde_prev, grad - grad_prev};
      if (step_rule == StepRule::DiagonalBb) {
        metric = update_metric(pair, metric, config.metric);
      } else if (step_rule == StepRule::ScalarBb) {
        metric = DiagonalMetric::scalar(d, scalar_bb_stepsize(pair, metric.u()[0], config.metric));
      }
    }

    // v_0 = grad F(w~^k): one effective pass.
    passes += 1.0;
    trace.component_gradients += n;

    const int t_k = inner_rule == InnerLength::Fixed ? config.m
                                                     : sample_inner_length(config.m, rng);
    w_prev = w_tilde;
    w_cur = w_tilde;
    v = grad;
    for (int t = 1; t <= t_k; ++t) {
      reservoir.offer(w_cur, k, t, metric, reservoir_rng);
      sample_minibatch(dist, static_cast<std::size_t>(config.b), rng, batch);
      if (estimator == EstimatorKind::Recursive) {
        add_batch_difference(smooth, batch, dist, w_cur, w_prev, v);
      } else {
        v = grad;
        add_batch_difference(smooth, batch, dist, w_cur, w_tilde, v);
      }
      passes += 2.0 * config.b / dn;
      trace.component_gradients += 2 * static_cast<std::size_t>(config.b);

      prox_gradient_step(reg, metric, w_cur, v, w_next);
      if (options.observer) {
        options.observer(InnerStep{k, t, w_prev, w_cur, w_next, v, metric});
      }
      w_prev.swap(w_cur);
      w_cur.swap(w_next);
    }
    trace.total_inner_steps += static_cast<std::size_t>(t_k);

    if (!all_finite(w_cur)) throw DivergenceError(k, "non-finite iterate");

    w_tilde_prev = std::move(w_tilde);
    grad_prev = std::move(grad);
    w_tilde = w_cur;
    grad = smooth.full_gradient(w_tilde);

    EpochRecord rec;
    rec.epoch = k + 1;
    rec.passes = passes;
    rec.objective = smooth.value(w_tilde) + reg.value(w_tilde);
    if (!std::isfinite(rec.objective)) throw DivergenceError(k, "non-finite objective");
    if (rec.objective > divergence_limit) {
      throw DivergenceError(k, "objective exceeded the divergence guard");
    }
    rec.gap = options.reference_value ? optimality_gap(rec.objective, *options.reference_value)
                                      : std::numeric_limits<double>::quiet_NaN();
    rec.grad_map_norm = std::sqrt(metric.norm_sq(gradient_mapping(w_tilde, grad, metric, reg)));
    rec.u_min = metric.min();
    rec.u_max = metric.max();
    rec.alpha1 = metric.upper();
    rec.alpha2 = metric.lower();
    rec.t_k = t_k;
    if (options.record_time) {
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    }
    trace.epochs.push_back(rec);
  }

  trace.last_iterate = w_tilde;
  trace.sample = reservoir.sample();
  return trace;
}

const Vector& select_output(const RunTrace& trace) {
  if (!trace.sample) throw Error("run recorded no inner iterates");
  return trace.sample->w;
}

}  // namespace vmprox
