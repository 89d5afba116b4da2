#include "vmprox/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "vmprox/diagnostics.hpp"
#include "vmprox/errors.hpp"
#include "vmprox/metric.hpp"
#include "vmprox/oracle.hpp"
#include "vmprox/prox.hpp"
#include "vmprox/sampling.hpp"

namespace vmprox {

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

namespace {

using ProxFn = std::function<Vector(const Regularizer&, const DiagonalMetric&, const Vector&)>;

double log_uniform(RngStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform01() * (std::log(hi) - std::log(lo)));
}

Vector random_vector(RngStream& rng, Eigen::Index d, double scale) {
  Vector v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

Vector random_metric(RngStream& rng, Eigen::Index d) {
  Vector u(d);
  for (auto& x : u) x = log_uniform(rng, 1e-3, 10.0);
  return u;
}

CheckResult make(std::string name, double worst, double tol, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.tolerance = tol;
  r.pass = std::isfinite(worst) && worst <= tol;
  r.detail = std::move(detail);
  return r;
}

CheckResult check_prox_oracle(const ProxFn& prox, RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double w = 3.0 * rng.normal();
    const double u = log_uniform(rng, 1e-3, 1e2);
    const double l1 = log_uniform(rng, 1e-6, 1.0);
    const auto reg = Regularizer::lasso(l1);
    const double got = prox(reg, DiagonalMetric::scalar(1, u), Vector::Constant(1, w))[0];
    worst = std::max(worst, std::abs(got - oracle::prox_1d_oracle(w, u, l1)));
  }
  return make("prox oracle equivalence", worst, 1e-8, "2000 random 1-D instances");
}

// ||p(x) - p(y)||^2_{U^-1} <= <p(x) - p(y), x - y>_{U^-1}
CheckResult check_firm_nonexpansive(const ProxFn& prox, RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Eigen::Index d = 4;
    const DiagonalMetric metric(random_metric(rng, d));
    const auto reg = Regularizer::elastic_net(log_uniform(rng, 1e-4, 1.0), log_uniform(rng, 1e-4, 1.0));
    const Vector x = random_vector(rng, d, 2.0);
    const Vector y = random_vector(rng, d, 2.0);
    const Vector diff = prox(reg, metric, x) - prox(reg, metric, y);
    const double lhs = metric.inverse_norm_sq(diff);
    const double rhs = (diff.cwiseProduct(x - y).cwiseQuotient(metric.u())).sum();
    worst = std::max(worst, (lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  return make("firm nonexpansiveness", worst, 1e-12, "500 random pairs, elastic net");
}

// <x - p, z - p>_{U^-1} <= R(z) - R(p) for every z
CheckResult check_three_point(const ProxFn& prox, RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Eigen::Index d = 3;
    const DiagonalMetric metric(random_metric(rng, d));
    const auto reg = Regularizer::lasso(log_uniform(rng, 1e-4, 1.0));
    const Vector x = random_vector(rng, d, 2.0);
    const Vector z = random_vector(rng, d, 2.0);
    const Vector p = prox(reg, metric, x);
    const double lhs = ((x - p).cwiseProduct(z - p).cwiseQuotient(metric.u())).sum();
    const double rhs = reg.value(z) - reg.value(p);
    worst = std::max(worst, (lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  return make("prox three-point property", worst, 1e-12, "500 random triples");
}

CheckResult check_prox_residual(const ProxFn& prox, RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Eigen::Index d = 5;
    const DiagonalMetric metric(random_metric(rng, d));
    const auto reg = Regularizer::elastic_net(log_uniform(rng, 1e-4, 1.0), log_uniform(rng, 1e-4, 1.0));
    const Vector w = random_vector(rng, d, 2.0);
    worst = std::max(worst, prox_optimality_residual(reg, metric, w, prox(reg, metric, w)));
  }
  return make("prox optimality residual", worst, 1e-10, "500 elastic-net instances");
}

CheckResult check_metric_oracle(RngStream& rng, bool& box_ok) {
  double worst = 0.0;
  box_ok = true;
  MetricConfig cfg;
  for (int k = 0; k < 200; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(16));
    cfg.omega = log_uniform(rng, 1e-2, 1e2);
    cfg.m = 1 + static_cast<int>(rng.uniform_index(50));
    const Vector s = random_vector(rng, d, 1.0);
    Vector y = s.cwiseProduct(random_metric(rng, d).cwiseInverse()) + 0.1 * random_vector(rng, d, 1.0);
    if (s.dot(y) <= 0.0) y = -y;
    if (s.dot(y) <= 0.0) continue;
    const Vector u_prev = random_metric(rng, d) / cfg.m;
    const auto bounds = bb_bounds({s, y}, cfg.m);
    const auto got = diagonal_bb_update({s, y}, u_prev, cfg, bounds.upper, bounds.lower);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double ui = got.u()[i];
      if (ui < bounds.lower || ui > bounds.upper) box_ok = false;
      const double want = oracle::metric_coordinate_oracle(s[i], y[i], u_prev[i], cfg.omega,
                                                           bounds.lower, bounds.upper);
      worst = std::max(worst, std::abs(ui - want));
    }
  }
  return make("metric oracle equivalence", worst, 1e-6, "200 random secant pairs, d <= 16");
}

CheckResult check_gradients(RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto ds = oracle::make_synthetic_classification(6, 4, rng.next(), {false, 0.2});
    const double lambda2 = log_uniform(rng, 1e-4, 1.0);
    const LogisticRidge model(ds, lambda2);
    const Vector w = random_vector(rng, 4, 1.0);
    const Vector fd = oracle::finite_diff_grad([&](const Vector& x) { return model.value(x); }, w, 1e-5);
    const Vector g = model.full_gradient(w);
    worst = std::max(worst, (g - fd).norm() / std::max(1e-8, g.norm()));
    const std::size_t i = rng.uniform_index(ds.n());
    const Vector fdi = oracle::finite_diff_grad(
        [&](const Vector& x) { return model.component_value(i, x); }, w, 1e-5);
    const Vector gi = model.component_gradient(i, w);
    worst = std::max(worst, (gi - fdi).norm() / std::max(1e-8, gi.norm()));
  }
  return make("gradient finite differences", worst, 1e-6, "100 logistic+ridge instances");
}

// f_i(y) >= f_i(x) + <grad f_i(x), y - x> and ||grad f_i(x) - grad f_i(y)|| <= L_i ||x - y||
CheckResult check_smoothness(RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto ds = oracle::make_synthetic_classification(5, 3, rng.next(), {false, 0.2});
    const LogisticRidge model(ds, 1e-2);
    const auto profile = model.smoothness();
    const Vector x = random_vector(rng, 3, 2.0);
    const Vector y = random_vector(rng, 3, 2.0);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const Vector gx = model.component_gradient(i, x);
      const double convexity = model.component_value(i, x) + gx.dot(y - x) - model.component_value(i, y);
      const double lipschitz = (gx - model.component_gradient(i, y)).norm() -
                               profile.per_component[i] * (x - y).norm();
      worst = std::max({worst, convexity, lipschitz});
    }
  }
  return make("component convexity and smoothness", worst, 1e-12, "100 instances");
}

struct EnumerationSetup {
  oracle::TinyInstance instance;
  Vector q;
  Vector u;
  Vector start;
};

EnumerationSetup tiny_setup(std::uint64_t seed, bool importance) {
  EnumerationSetup s;
  s.instance = oracle::make_tiny_instance(3, 2, oracle::Loss::Logistic, 0.1, 0.05, seed);
  s.q = Vector::Constant(3, 1.0 / 3.0);
  if (importance) {
    for (Eigen::Index i = 0; i < 3; ++i) s.q[i] = s.instance.component_lipschitz(static_cast<std::size_t>(i));
    s.q /= s.q.sum();
  }
  const double l_omega = oracle::tiny_l_omega(s.instance, s.q);
  s.u = Vector::Constant(2, 0.5 / l_omega);
  s.u[1] = 0.9 / l_omega;
  s.start = Vector::Constant(2, 0.7);
  s.start[1] = -1.1;
  return s;
}

oracle::EnumerationInput enumeration_input(const EnumerationSetup& s, oracle::Estimator est,
                                           int depth) {
  oracle::EnumerationInput in;
  in.instance = &s.instance;
  in.estimator = est;
  in.depth = depth;
  in.b = 1;
  in.q = s.q;
  in.u = s.u;
  in.start = s.start;
  return in;
}

void check_estimators(std::uint64_t seed, std::vector<CheckResult>& out) {
  double unbiased = 0.0, svrg = 0.0, margin = 0.0, agreement = 0.0, mc = 0.0;
  for (bool importance : {false, true}) {
    const auto setup = tiny_setup(seed, importance);
    for (int t : {1, 2}) {
      const auto in = enumeration_input(setup, oracle::Estimator::Recursive, t);
      const auto mom = oracle::enumerate_expectation(in);
      unbiased = std::max(unbiased, (mom.mean_v - mom.mean_grad).cwiseAbs().maxCoeff());
      const double l_omega = oracle::tiny_l_omega(setup.instance, setup.q);
      margin = std::max(margin, mom.variance - l_omega * l_omega * mom.step_sq);

      const auto svrg_mom =
          oracle::enumerate_expectation(enumeration_input(setup, oracle::Estimator::Svrg, t));
      svrg = std::max(svrg, (svrg_mom.mean_v - svrg_mom.mean_grad).cwiseAbs().maxCoeff());

      // Same quantities from the diagnostics module driving the real solver step.
      const oracle::TinySmooth smooth(setup.instance);
      const std::vector<double> q(setup.q.data(), setup.q.data() + setup.q.size());
      const SamplingDistribution dist(q, importance ? SamplingScheme::Importance : SamplingScheme::Uniform,
                                      l_omega);
      VarianceCheckInput vin;
      vin.smooth = &smooth;
      vin.reg = Regularizer::lasso(setup.instance.l1);
      vin.metric = DiagonalMetric(setup.u);
      vin.start = setup.start;
      vin.b = 1;
      vin.t = t;
      vin.dist = &dist;
      const auto rep = estimator_variance_check(vin);
      agreement = std::max({agreement, std::abs(rep.variance - mom.variance),
                            std::abs(rep.step_sq - mom.step_sq),
                            (rep.mean_v - mom.mean_v).cwiseAbs().maxCoeff()});

      if (t == 2) {
        const auto sim = oracle::monte_carlo_expectation(in, 100000, seed + (importance ? 1 : 0));
        const double z = std::abs(sim.variance - mom.variance) / std::max(sim.variance_se, 1e-300);
        mc = std::max(mc, z);
        for (Eigen::Index i = 0; i < sim.mean_v.size(); ++i) {
          if (sim.mean_v_se[i] > 0.0) mc = std::max(mc, std::abs(sim.mean_v[i] - mom.mean_v[i]) / sim.mean_v_se[i]);
        }
      }
    }
  }
  out.push_back(make("recursive estimator unbiased in total expectation", unbiased, 1e-12,
                     "exact enumeration, n = 3, b = 1, t <= 2, uniform and importance"));
  out.push_back(make("svrg estimator unbiased", svrg, 1e-12, "exact enumeration"));
  out.push_back(make("estimator variance bound", margin, 0.0,
                     "E||v_t - grad F||^2 - (L^2/b) E||w_t - w_{t-1}||^2, t <= 2"));
  out.push_back(make("enumeration agrees with solver diagnostics", agreement, 1e-12));
  out.push_back(make("Monte-Carlo agrees with enumeration", mc, 4.0,
                     "worst z-score over 1e5 simulated paths"));
}

CheckResult check_rate() {
  RateInputs in;
  in.modulus = 1.0;
  in.l_omega = 1.0;
  in.u_min = in.u_max = 0.1;
  in.m = 100;
  in.b = 1;
  double worst = std::abs(theoretical_rate(in).value - 0.52);
  in.u_max = in.b / (8.0 * in.l_omega);
  in.u_min = in.u_max;
  bool raised = false;
  try {
    theoretical_rate(in);
  } catch (const RateHypothesisError&) {
    raised = true;
  }
  if (!raised) worst = std::numeric_limits<double>::infinity();
  return make("rate constant", worst, 1e-12, "reference inputs give 0.52; boundary raises");
}

CheckResult check_gradient_mapping(RngStream& rng) {
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto ds = oracle::make_synthetic_classification(8, 3, rng.next());
    const LogisticRidge model(ds, 1e-3);
    const DiagonalMetric metric(random_metric(rng, 3));
    const Vector w = random_vector(rng, 3, 1.0);
    const Vector g = model.full_gradient(w);
    worst = std::max(worst, (gradient_mapping(w, metric, model, Regularizer::zero()) - g)
                                .cwiseAbs().maxCoeff() / (1.0 + g.norm()));
  }
  return make("gradient mapping equals gradient when R = 0", worst, 1e-12);
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
  ProxFn prox = [](const Regularizer& reg, const DiagonalMetric& metric, const Vector& w) {
    return scaled_prox(reg, metric, w);
  };
  if (options.fault == Fault::CorruptProx) {
    prox = [](const Regularizer& reg, const DiagonalMetric& metric, const Vector& w) {
      return Vector(1.5 * scaled_prox(reg, metric, w));
    };
  }

  VerifyReport report;
  auto& out = report.checks;
  RngStream rng(derive_seed(options.seed, 7));
  out.push_back(check_prox_oracle(prox, rng));
  out.push_back(check_firm_nonexpansive(prox, rng));
  out.push_back(check_three_point(prox, rng));
  out.push_back(check_prox_residual(prox, rng));
  bool box_ok = true;
  out.push_back(check_metric_oracle(rng, box_ok));
  out.push_back(make("metric respects BB box", box_ok ? 0.0 : 1.0, 0.0));
  out.push_back(check_gradients(rng));
  out.push_back(check_smoothness(rng));
  check_estimators(options.seed, out);
  out.push_back(check_rate());
  out.push_back(check_gradient_mapping(rng));
  return report;
}

std::string format_report(const VerifyReport& report) {
  std::string text;
  char line[256];
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%-4s  %-50s  worst=%-12.4e tol=%.1e\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.tolerance);
    text += line;
  }
  const auto failed = report.failures();
  std::snprintf(line, sizeof line, "%zu/%zu checks passed\n",
                report.checks.size() - failed.size(), report.checks.size());
  text += line;
  for (const auto& name : failed) text += "failed invariant: " + name + "\n";
  return text;
}

}  // namespace vmprox
