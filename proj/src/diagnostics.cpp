#include "vmprox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmprox/errors.hpp"

namespace vmprox {

Vector gradient_mapping(const Vector& w, const Vector& grad,
                        const DiagonalMetric& metric, const Regularizer& reg) {
  Vector stepped;
  prox_gradient_step(reg, metric, w, grad, stepped);
  return (w - stepped).cwiseQuotient(metric.u());
}

Vector gradient_mapping(const Vector& w, const DiagonalMetric& metric,
                        const SmoothObjective& smooth, const Regularizer& reg) {
  return gradient_mapping(w, smooth.full_gradient(w), metric, reg);
}

double optimality_gap(double value, double reference) {
  return std::max(value - reference, kGapFloor);
}

namespace {

struct PhaseResult {
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
};

// Proximal gradient with a fixed scalar metric. Stops on the tolerance, the
// budget, or when the residual has not improved for `patience` iterations
// (floating-point floor reached).
PhaseResult proximal_gradient_phase(const SmoothObjective& smooth,
                                    const Regularizer& reg,
                                    const DiagonalMetric& metric, double tol,
                                    std::size_t budget, Vector& w,
                                    std::size_t& iterations) {
  constexpr std::size_t patience = 2000;
  PhaseResult result;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  Vector grad, next;
  for (std::size_t it = 0;; ++it) {
    grad = smooth.full_gradient(w);
    prox_gradient_step(reg, metric, w, grad, next);
    result.residual = ((w - next).cwiseQuotient(metric.u())).norm();
    if (result.residual <= tol) {
      result.converged = true;
      return result;
    }
    if (it >= budget) return result;
    if (result.residual < best) {
      best = result.residual;
      since_best = 0;
    } else if (++since_best > patience) {
      return result;
    }
    w.swap(next);
    ++iterations;
  }
}

}  // namespace

ReferenceSolution compute_reference(const SmoothObjective& smooth,
                                    const Regularizer& reg,
                                    const ReferenceOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("reference tolerance must be positive");
  const auto profile = smooth.smoothness();
  const double step = 1.0 / profile.max;
  const auto metric = DiagonalMetric::scalar(smooth.dim(), step);

  ReferenceSolution ref;
  ref.w = Vector::Zero(static_cast<Eigen::Index>(smooth.dim()));
  auto phase = proximal_gradient_phase(smooth, reg, metric, options.tol,
                                       options.max_iterations, ref.w, ref.iterations);

  if (!phase.converged && options.polish_epochs > 0) {
    SolverConfig polish;
    polish.algorithm = Algorithm::ProxSvrg;
    polish.m = static_cast<int>(std::min<std::size_t>(2 * smooth.num_components(), 1u << 30));
    polish.b = 1;
    polish.epochs = options.polish_epochs;
    polish.eta0 = 0.5 * step;
    polish.seed = options.seed;
    RunOptions run_options;
    run_options.initial_point = ref.w;
    try {
      const auto trace = run(polish, smooth, reg, run_options);
      if (objective(smooth, reg, trace.last_iterate) < objective(smooth, reg, ref.w)) {
        ref.w = trace.last_iterate;
        ref.polished = true;
      }
    } catch (const DivergenceError&) {
      // keep the proximal-gradient iterate
    }
    phase = proximal_gradient_phase(smooth, reg, metric, options.tol,
                                    options.max_iterations, ref.w, ref.iterations);
  }

  ref.residual = phase.residual;
  ref.value = objective(smooth, reg, ref.w);
  if (!phase.converged) {
    throw MaxIterationsError("reference solver stopped at residual " +
                             std::to_string(ref.residual) + " > tol " +
                             std::to_string(options.tol));
  }
  return ref;
}

RateResult theoretical_rate(const RateInputs& in, RateMode /*mode*/) {
  if (!(in.modulus > 0.0) || !(in.l_omega > 0.0) || !(in.u_min > 0.0) ||
      !(in.u_max >= in.u_min) || in.m < 1 || in.b < 1) {
    throw ConfigError("rate inputs must be positive with u_min <= u_max");
  }
  const double kappa = 8.0 * in.l_omega * in.u_max / in.b;
  if (!(kappa < 1.0)) {
    throw RateHypothesisError("8 L_Omega u_max / b = " + std::to_string(kappa) + " >= 1");
  }
  const double slack = 1.0 - kappa;
  const double m = in.m;
  RateResult r;
  r.value = 1.0 / (m * in.modulus * in.u_min * slack) +
            4.0 * in.l_omega * in.u_max / (m * in.b * slack);
  r.contraction = r.value < 1.0;
  return r;
}

double inner_loop_contraction(double mu_f, double l_omega, double u_min,
                              double u_max) {
  if (!(mu_f > 0.0) || !(l_omega > 0.0) || !(u_min > 0.0) || !(u_max >= u_min)) {
    throw ConfigError("contraction inputs must be positive with u_min <= u_max");
  }
  if (u_max > 2.0 / l_omega) {
    throw RateHypothesisError("inner-loop contraction needs u_max <= 2 / L_Omega");
  }
  return 1.0 - mu_f * mu_f * u_min * (2.0 / l_omega - u_max);
}

double default_modulus(double smooth_lambda2, const Regularizer& reg) {
  const bool has_l2 = reg.kind == Regularizer::Kind::L2 ||
                      reg.kind == Regularizer::Kind::ElasticNet;
  return smooth_lambda2 + (has_l2 ? reg.l2 : 0.0);
}

ConvexBoundReport convex_bound_check(std::span<const ConvexBoundSample> samples,
                                     double initial_gap, double l_omega) {
  ConvexBoundReport r;
  r.runs = samples.size();
  if (samples.empty()) return r;
  const double n = static_cast<double>(samples.size());
  const double u_limit = 1.0 / (3.0 * l_omega);

  double sum = 0.0, sum_scaled = 0.0, sum_inv_t = 0.0;
  for (const auto& s : samples) {
    if (s.total_steps == 0) throw ConfigError("convex bound sample with T = 0");
    sum += s.grad_map_sq;
    sum_scaled += s.grad_map_sq * static_cast<double>(s.total_steps);
    sum_inv_t += 1.0 / static_cast<double>(s.total_steps);
    if (s.total_steps != samples.front().total_steps) r.constant_horizon = false;
    if (s.u_max > u_limit * (1.0 + 1e-12)) r.hypothesis_ok = false;
  }
  r.mean = sum / n;
  r.scaled_mean = sum_scaled / n;
  double ss = 0.0, ss_scaled = 0.0;
  for (const auto& s : samples) {
    ss += (s.grad_map_sq - r.mean) * (s.grad_map_sq - r.mean);
    const double x = s.grad_map_sq * static_cast<double>(s.total_steps);
    ss_scaled += (x - r.scaled_mean) * (x - r.scaled_mean);
  }
  if (samples.size() > 1) {
    r.std_error = std::sqrt(ss / (n - 1.0) / n);
    r.scaled_std_error = std::sqrt(ss_scaled / (n - 1.0) / n);
  }
  r.bound = 6.0 * initial_gap * (sum_inv_t / n);
  r.margin = 6.0 * initial_gap + 2.0 * r.scaled_std_error - r.scaled_mean;
  r.pass = r.margin >= 0.0;
  return r;
}

namespace {

struct PathMoments {
  Vector sum_v;
  Vector sum_grad;
  double variance = 0.0;
  double step_sq = 0.0;
  double objective_terms = 0.0;
  double weight = 0.0;
  std::size_t paths = 0;
};

struct PathContext {
  const VarianceCheckInput& in;
  double reference = 0.0;
};

void accumulate_leaf(const PathContext& ctx, double weight, const Vector& v,
                     const Vector& w, const Vector& w_prev, PathMoments& acc) {
  const auto& smooth = *ctx.in.smooth;
  const Vector g = smooth.full_gradient(w);
  acc.sum_v += weight * v;
  acc.sum_grad += weight * g;
  acc.variance += weight * (v - g).squaredNorm();
  acc.step_sq += weight * (w - w_prev).squaredNorm();
  if (ctx.in.reference_value) {
    acc.objective_terms += weight * (objective(smooth, ctx.in.reg, w) - ctx.reference +
                                     objective(smooth, ctx.in.reg, w_prev) - ctx.reference);
  }
  acc.weight += weight;
  ++acc.paths;
}

// Step s consumes one mini-batch; recursion enumerates all of them.
void enumerate_steps(const PathContext& ctx, int s, double weight,
                     const Vector& v_prev, const Vector& w, const Vector& w_prev,
                     PathMoments& acc) {
  const auto& in = ctx.in;
  const auto& dist = *in.dist;
  const std::size_t n = dist.size();
  std::vector<std::size_t> batch(in.b, 0);
  // odometer over all n^b ordered batches
  while (true) {
    double p = weight;
    for (auto i : batch) p *= dist.q()[i];
    const Vector v = srg_estimator_step(*in.smooth, v_prev, w, w_prev, batch, dist);
    if (s == in.t) {
      accumulate_leaf(ctx, p, v, w, w_prev, acc);
    } else {
      Vector w_next;
      prox_gradient_step(in.reg, in.metric, w, v, w_next);
      enumerate_steps(ctx, s + 1, p, v, w_next, w, acc);
    }
    std::size_t pos = 0;
    while (pos < in.b && ++batch[pos] == n) batch[pos++] = 0;
    if (pos == in.b) break;
  }
}

}  // namespace

VarianceReport estimator_variance_check(const VarianceCheckInput& in) {
  if (in.smooth == nullptr || in.dist == nullptr) {
    throw ConfigError("variance check needs a smooth objective and a distribution");
  }
  if (in.t < 1 || in.b < 1) throw ConfigError("variance check needs t >= 1 and b >= 1");
  const auto& smooth = *in.smooth;
  const Eigen::Index d = static_cast<Eigen::Index>(smooth.dim());

  PathContext ctx{in, in.reference_value.value_or(0.0)};
  PathMoments acc;
  acc.sum_v = Vector::Zero(d);
  acc.sum_grad = Vector::Zero(d);

  const Vector v0 = smooth.full_gradient(in.start);
  if (in.mode == ExpectationMode::Exact) {
    const double paths = std::pow(static_cast<double>(in.dist->size()),
                                  static_cast<double>(in.b) * in.t);
    if (paths > 1e6) throw PathExplosionError("exact enumeration would need " + std::to_string(paths) + " paths");
    enumerate_steps(ctx, 1, 1.0, v0, in.start, in.start, acc);
  } else {
    RngStream rng(in.seed);
    std::vector<std::size_t> batch;
    for (std::size_t r = 0; r < in.samples; ++r) {
      Vector w_prev = in.start, w = in.start, v = v0, w_next;
      for (int s = 1;; ++s) {
        sample_minibatch(*in.dist, in.b, rng, batch);
        v = srg_estimator_step(smooth, v, w, w_prev, batch, *in.dist);
        if (s == in.t) break;
        prox_gradient_step(in.reg, in.metric, w, v, w_next);
        w_prev = w;
        w = w_next;
      }
      accumulate_leaf(ctx, 1.0 / static_cast<double>(in.samples), v, w, w_prev, acc);
    }
  }

  VarianceReport r;
  r.paths = acc.paths;
  r.mean_v = acc.sum_v / acc.weight;
  r.mean_grad = acc.sum_grad / acc.weight;
  r.variance = acc.variance / acc.weight;
  r.step_sq = acc.step_sq / acc.weight;
  const double l_omega = in.dist->l_omega();
  r.bound_lipschitz = l_omega * l_omega / static_cast<double>(in.b) * r.step_sq;
  r.margin_lipschitz = r.bound_lipschitz - r.variance;
  if (in.reference_value) {
    r.bound_objective = 4.0 * l_omega / static_cast<double>(in.b) * acc.objective_terms / acc.weight;
    r.margin_objective = *r.bound_objective - r.variance;
  }
  return r;
}

}  // namespace vmprox
