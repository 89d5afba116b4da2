// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run only criterion N
//
// Exit status: 0 when every selected criterion passes, 1 on any failure and
// 77 when the only non-passing criterion was skipped.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "vmprox/diagnostics.hpp"
#include "vmprox/errors.hpp"
#include "vmprox/metric.hpp"
#include "vmprox/oracle.hpp"
#include "vmprox/prox.hpp"
#include "vmprox/run_spec.hpp"
#include "vmprox/solvers.hpp"
#include "vmprox/trace_csv.hpp"

using namespace vmprox;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double log_uniform(RngStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform01() * (std::log(hi) - std::log(lo)));
}

Vector random_vector(RngStream& rng, Eigen::Index d, double scale = 1.0) {
  Vector v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (n - 1.0) / n);
  return r;
}

// 1. Scaled prox against the brute-force 1-D oracle.
Outcome prox_equivalence() {
  constexpr double kTol = 1e-8;
  RngStream rng(101);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double w = 3.0 * rng.normal();
    const double u = log_uniform(rng, 1e-3, 1e2);
    const double l1 = log_uniform(rng, 1e-6, 1.0);
    const double got = scaled_prox(Regularizer::lasso(l1), DiagonalMetric::scalar(1, u), Vector::Constant(1, w))[0];
    worst = std::max(worst, std::abs(got - oracle::prox_1d_oracle(w, u, l1)));
  }
  return {worst <= kTol ? Status::Pass : Status::Fail,
          fmt("10000 instances, max abs err %.3e (tol %.0e)", worst, kTol)};
}

// 2. Diagonal BB update against the per-coordinate grid oracle.
Outcome metric_equivalence() {
  constexpr double kTol = 1e-6;
  RngStream rng(202);
  double worst = 0.0;
  std::size_t box_violations = 0;
  MetricConfig cfg;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(16));
    const Vector s = random_vector(rng, d);
    Vector h(d);
    for (auto& x : h) x = log_uniform(rng, 1e-2, 1e2);
    Vector y = s.cwiseProduct(h) + 0.1 * random_vector(rng, d);
    if (s.dot(y) <= 0.0) y = s.cwiseProduct(h);
    const SecantPair pair{s, y};
    cfg.omega = log_uniform(rng, 1e-3, 1e3);
    cfg.m = 1 + static_cast<int>(rng.uniform_index(50));
    Vector u_prev(d);
    for (auto& x : u_prev) x = log_uniform(rng, 1e-3, 10.0);
    const auto box = bb_bounds(pair, cfg.m);
    const auto u = diagonal_bb_update(pair, u_prev, cfg, box.upper, box.lower);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (u.u()[i] < box.lower || u.u()[i] > box.upper) ++box_violations;
      const double want = oracle::metric_coordinate_oracle(s[i], y[i], u_prev[i], cfg.omega, box.lower, box.upper);
      worst = std::max(worst, std::abs(u.u()[i] - want));
    }
  }
  const bool ok = worst <= kTol && box_violations == 0;
  return {ok ? Status::Pass : Status::Fail,
          fmt("1000 instances, max abs err %.3e (tol %.0e), box violations %.0f", worst, kTol,
              static_cast<double>(box_violations))};
}

// 3. Logistic + ridge gradients against central differences.
Outcome gradient_correctness() {
  constexpr double kTol = 1e-6;
  constexpr double kStep = 1e-5;
  RngStream rng(303);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + rng.uniform_index(20), d = 1 + rng.uniform_index(10);
    const auto ds = oracle::make_synthetic_classification(n, d, 1000 + static_cast<std::uint64_t>(k),
                                                          {rng.uniform01() < 0.5, 0.1});
    const LogisticRidge model(ds, log_uniform(rng, 1e-6, 1.0));
    const Vector w = random_vector(rng, static_cast<Eigen::Index>(d));
    auto rel = [](const Vector& g, const Vector& fd) { return (g - fd).norm() / std::max(g.norm(), 1e-6); };
    const Vector full = model.full_gradient(w);
    worst = std::max(worst, rel(full, oracle::finite_diff_grad([&](const Vector& x) { return model.value(x); }, w, kStep)));
    const std::size_t i = rng.uniform_index(n);
    const Vector comp = model.component_gradient(i, w);
    worst = std::max(worst, rel(comp, oracle::finite_diff_grad(
                                          [&](const Vector& x) { return model.component_value(i, x); }, w, kStep)));
  }
  return {worst <= kTol ? Status::Pass : Status::Fail,
          fmt("1000 instances, max rel err %.3e (tol %.0e)", worst, kTol)};
}

// 4. Recursive estimator laws by exact enumeration (n = 3, b = 1, m = 2).
Outcome estimator_laws() {
  constexpr double kBiasTol = 1e-12;
  double worst_bias = 0.0, worst_margin = std::numeric_limits<double>::infinity();
  double worst_oracle = 0.0;
  int instances = 0;
  RngStream rng(404);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto loss = seed % 2 ? oracle::Loss::Squared : oracle::Loss::Logistic;
    const auto inst = oracle::make_tiny_instance(3, 2, loss, 0.05, 0.05 * static_cast<double>(seed % 4), seed);
    const oracle::TinySmooth smooth(inst);
    for (auto scheme : {SamplingScheme::Uniform, SamplingScheme::Importance}) {
      const auto dist = build_distribution(smooth.smoothness(), scheme);
      Vector u(2);
      for (auto& x : u) x = (0.05 + 0.95 * rng.uniform01()) / dist.l_omega();
      const Vector start = random_vector(rng, 2);
      for (int t = 1; t <= 2; ++t) {
        VarianceCheckInput in;
        in.smooth = &smooth;
        in.reg = Regularizer::lasso(inst.l1);
        in.metric = DiagonalMetric(u);
        in.start = start;
        in.dist = &dist;
        in.t = t;
        const auto r = estimator_variance_check(in);
        worst_bias = std::max(worst_bias, (r.mean_v - r.mean_grad).cwiseAbs().maxCoeff());
        worst_margin = std::min(worst_margin, r.margin_lipschitz);

        oracle::EnumerationInput oin;
        oin.instance = &inst;
        oin.depth = t;
        oin.q = Eigen::Map<const Vector>(dist.q().data(), 3);
        oin.u = u;
        oin.start = start;
        const auto o = oracle::enumerate_expectation(oin);
        worst_bias = std::max(worst_bias, (o.mean_v - o.mean_grad).cwiseAbs().maxCoeff());
        worst_oracle = std::max(worst_oracle, std::abs(o.variance - r.variance));
        ++instances;
      }
    }
  }
  const bool ok = worst_bias <= kBiasTol && worst_margin >= 0.0 && worst_oracle <= 1e-12;
  return {ok ? Status::Pass : Status::Fail,
          fmt("max |E v - E grad| %.3e (tol %.0e), min variance-bound margin %.3e", worst_bias, kBiasTol,
              worst_margin) +
              fmt(", library vs oracle variance %.2e over %.0f cases", worst_oracle, instances)};
}

// 5. Inner-loop steps shrink in the metric norm, in expectation.
Outcome inner_monotonicity() {
  constexpr int kSeeds = 200;
  constexpr int kM = 11;
  constexpr int kEpochs = 3;
  const auto ds = oracle::make_synthetic_classification(200, 10, 505);
  const LogisticRidge smooth(ds, 1e-2);
  const auto reg = Regularizer::lasso(1e-3);
  const double l_omega = build_distribution(smooth.smoothness(), SamplingScheme::Uniform).l_omega();

  // steps[k][t][seed] = ||w_{t+1} - w_t||^2_{U^{-1}}
  std::vector<std::vector<std::vector<double>>> steps(
      kEpochs, std::vector<std::vector<double>>(kM + 1, std::vector<double>(kSeeds)));
  for (int s = 0; s < kSeeds; ++s) {
    SolverConfig c;
    c.m = kM;
    c.b = 1;
    c.epochs = kEpochs;
    c.eta0 = 1.0 / l_omega;
    c.metric.cap = 1.0 / l_omega;
    c.inner = InnerLength::Fixed;
    c.seed = static_cast<std::uint64_t>(s);
    RunOptions opts;
    opts.observer = [&](const InnerStep& st) {
      steps[st.epoch][st.t][s] = st.metric.inverse_norm_sq(st.w_next - st.w);
    };
    run(c, smooth, reg, opts);
  }
  double worst_z = -std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int k = 0; k < kEpochs; ++k) {
    for (int t = 2; t < 10; ++t) {
      std::vector<double> diff(kSeeds);
      for (int s = 0; s < kSeeds; ++s) diff[s] = steps[k][t + 1][s] - steps[k][t][s];
      const auto d = mean_se(diff);
      const double z = d.se > 0.0 ? d.mean / d.se : (d.mean > 0.0 ? INFINITY : -INFINITY);
      worst_z = std::max(worst_z, z);
      if (d.mean > 2.0 * d.se) ++violations;
    }
  }
  return {violations == 0 ? Status::Pass : Status::Fail,
          fmt("%.0f seeds x %.0f epochs, largest increase %.2f SE (limit 2)", kSeeds, kEpochs, worst_z) +
              (violations ? fmt(", %.0f violations", violations) : std::string())};
}

// 6. Linear convergence of VM-mSRGBB.
Outcome linear_convergence() {
  constexpr double kGapTol = 1e-10;
  constexpr double kPasses = 40.0;
  const auto ds = oracle::make_synthetic_classification(1000, 20, 606);
  const LogisticRidge smooth(ds, 1e-2);
  const auto reg = Regularizer::lasso(1e-3);
  const auto ref = compute_reference(smooth, reg);
  SolverConfig c;
  c.m = 70;  // 0.07n
  c.b = 4;
  c.epochs = 40;
  c.eta0 = 0.1;
  c.seed = 6;
  RunOptions opts;
  opts.reference_value = ref.value;
  const auto trace = run(c, smooth, reg, opts);

  double reached = std::numeric_limits<double>::infinity();
  std::vector<double> xs, ys;
  for (const auto& r : trace.epochs) {
    if (r.passes > kPasses) break;
    if (r.gap <= kGapTol && !std::isfinite(reached)) reached = r.passes;
    // fit only above the gap floor, where the log-gap still carries signal
    if (r.gap > 1e-14) {
      xs.push_back(r.epoch);
      ys.push_back(std::log10(r.gap));
    }
  }
  double slope = NAN, r2 = NAN;
  if (xs.size() >= 3) {
    const auto mx = mean_se(xs).mean, my = mean_se(ys).mean;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    slope = sxy / sxx;
    r2 = sxy * sxy / (sxx * syy);
  }
  const bool ok = std::isfinite(reached) && slope < 0.0 && r2 >= 0.9;
  return {ok ? Status::Pass : Status::Fail,
          fmt("gap <= 1e-10 after %.2f passes (limit 40); log10-gap slope %.3f/epoch, R^2 %.4f", reached, slope, r2)};
}

// 7. Convex-case bound on the gradient mapping at the sampled output.
Outcome convex_bound() {
  constexpr int kSeeds = 500;
  const auto ds = oracle::make_synthetic_classification(50, 5, 707);
  const LogisticRidge smooth(ds, 0.0);
  const auto reg = Regularizer::lasso(1e-2);
  const double l_omega = build_distribution(smooth.smoothness(), SamplingScheme::Uniform).l_omega();
  const double cap = 1.0 / (3.0 * l_omega);
  const auto ref = compute_reference(smooth, reg);
  std::vector<ConvexBoundSample> samples;
  double initial = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    SolverConfig c;
    c.m = 10;
    c.b = 1;
    c.epochs = 5;
    c.eta0 = cap;
    c.metric.cap = cap;
    c.seed = static_cast<std::uint64_t>(s);
    const auto trace = run(c, smooth, reg);
    initial = trace.initial_objective;
    const auto& out = *trace.sample;
    const Vector g = gradient_mapping(out.w, out.metric, smooth, reg);
    double u_max = c.eta0;
    for (const auto& r : trace.epochs) u_max = std::max(u_max, r.u_max);
    samples.push_back({out.metric.norm_sq(g), trace.total_inner_steps, u_max});
  }
  const auto r = convex_bound_check(samples, initial - ref.value, l_omega);
  // T varies with the random inner lengths, so the bound is checked both on
  // T * ||G||^2 against 6 gap and on the plain mean against 6 gap * mean(1/T).
  const bool plain_ok = r.mean <= r.bound + 2.0 * r.std_error;
  const bool ok = r.pass && plain_ok && r.hypothesis_ok;
  return {ok ? Status::Pass : Status::Fail,
          fmt("mean T*||G||^2_U = %.4e +- %.2e vs 6(P(w0)-P*) = %.4e", r.scaled_mean, r.scaled_std_error,
              6.0 * (initial - ref.value)) +
              fmt("; mean ||G||^2_U = %.4e +- %.2e vs %.4e", r.mean, r.std_error, r.bound) +
              (r.hypothesis_ok ? "" : " (stepsize hypothesis violated)")};
}

// 8. Qualitative comparison on ijcnn1.
Outcome ijcnn1_comparison() {
  const fs::path path = resolve_data_path("ijcnn1");
  if (!fs::exists(path)) {
    return {Status::Skip, "ijcnn1 not found; place it under $VMPROX_DATA_DIR to run this criterion"};
  }
  const auto ds = load_libsvm(path);
  const LogisticRidge smooth(ds, 1e-4);
  const auto reg = Regularizer::lasso(1e-5);
  const auto ref = compute_reference(smooth, reg);
  const int n = static_cast<int>(ds.n());
  RunOptions opts;
  opts.reference_value = ref.value;
  auto gap20 = [&](SolverConfig c) {
    try {
      return gap_at_passes(run(c, smooth, reg, opts), 20.0);
    } catch (const DivergenceError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<double> vm;
  for (double eta0 : {1.0, 0.1, 0.01}) {
    SolverConfig c;
    c.m = static_cast<int>(std::lround(0.07 * n));
    c.b = 4;
    c.epochs = 20;
    c.eta0 = eta0;
    c.seed = 8;
    vm.push_back(gap20(c));
  }
  const double best = std::min({vm[0], vm[1], vm[2]});
  const double worst = std::max({vm[0], vm[1], vm[2]});
  const double l_max = smooth.smoothness().max;
  int wins = 0;
  std::vector<double> svrg;
  for (double scale : {10.0, 1.0, 0.1}) {
    SolverConfig c;
    c.algorithm = Algorithm::ProxSvrg;
    c.m = 2 * n;
    c.b = 1;
    c.epochs = 4;
    c.eta0 = scale / l_max;
    c.metric.cap = std::max(c.metric.cap, c.eta0);
    c.seed = 8;
    svrg.push_back(gap20(c));
    if (best <= svrg.back()) ++wins;
  }
  const bool spread_ok = worst <= 10.0 * best;
  const bool ok = spread_ok && wins >= 2;
  return {ok ? Status::Pass : Status::Fail,
          fmt("VM-mSRGBB gaps at 20 passes %.2e / %.2e / %.2e", vm[0], vm[1], vm[2]) +
              fmt("; Prox-SVRG %.2e / %.2e / %.2e", svrg[0], svrg[1], svrg[2]) +
              fmt("; beaten %.0f of 3", wins)};
}

// 9. Rate constant and hypothesis check.
Outcome rate_constant() {
  const RateInputs example{1.0, 1.0, 0.1, 0.1, 100, 1};
  const double value = theoretical_rate(example).value;
  bool raise_ok = true;
  RngStream rng(909);
  for (int k = 0; k < 10000; ++k) {
    RateInputs in{log_uniform(rng, 1e-3, 1.0), log_uniform(rng, 0.1, 10.0), 0.0, 0.0,
                  1 + static_cast<int>(rng.uniform_index(1000)), 1 + static_cast<int>(rng.uniform_index(16))};
    in.u_max = log_uniform(rng, 0.01, 4.0) * in.b / (8.0 * in.l_omega);
    if (k % 10 == 0) in.u_max = in.b / (8.0 * in.l_omega);
    in.u_min = in.u_max * rng.uniform01();
    if (in.u_min <= 0.0) in.u_min = in.u_max;
    const bool expect_raise = 8.0 * in.l_omega * in.u_max / in.b >= 1.0;
    bool raised = false;
    try {
      theoretical_rate(in);
    } catch (const RateHypothesisError&) {
      raised = true;
    }
    raise_ok &= raised == expect_raise;
  }
  const bool ok = std::abs(value - 0.52) <= 1e-12 && raise_ok;
  return {ok ? Status::Pass : Status::Fail,
          fmt("rho = %.17g (want 0.52, tol 1e-12); hypothesis raise ", value) +
              (raise_ok ? "consistent on 10000 inputs" : "INCONSISTENT")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Byte-identical reruns through the command-line tool.
Outcome determinism() {
  std::string tmpl = (fs::temp_directory_path() / "vmprox_accept_XXXXXX").string();
  const fs::path dir = ::mkdtemp(tmpl.data());
  std::ofstream(dir / "toy.txt") << serialize_libsvm(oracle::make_synthetic_classification(300, 8, 1010));
  int identical = 0, total = 0;
  std::string failure;
  for (auto alg : all_algorithms()) {
    const std::string base = "cd '" + dir.string() + "' && '" VMPROX_BINARY "' run --data toy.txt --epochs 5 "
                             "--m 0.1n --seed 42 --algorithm " + to_string(alg) + " -o ";
    const int a = std::system((base + "a.csv 2>/dev/null").c_str());
    const int b = std::system((base + "b.csv 2>/dev/null").c_str());
    ++total;
    if (a != 0 || b != 0) {
      failure = to_string(alg) + " exited nonzero";
      continue;
    }
    const auto ca = slurp(dir / "a.csv");
    if (!ca.empty() && ca == slurp(dir / "b.csv")) ++identical;
  }
  fs::remove_all(dir);
  return {identical == total ? Status::Pass : Status::Fail,
          fmt("%.0f of %.0f algorithms produced byte-identical CSV", identical, total) +
              (failure.empty() ? "" : "; " + failure)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "prox oracle equivalence", prox_equivalence},
      {2, "metric oracle equivalence", metric_equivalence},
      {3, "gradient correctness", gradient_correctness},
      {4, "estimator laws by enumeration", estimator_laws},
      {5, "inner-loop monotonicity", inner_monotonicity},
      {6, "linear convergence", linear_convergence},
      {7, "convex-case bound", convex_bound},
      {8, "ijcnn1 comparison", ijcnn1_comparison},
      {9, "rate constant", rate_constant},
      {10, "determinism", determinism},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }

  bool failed = false, skipped = false;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::printf("%s  %2d  %-30s  %s  [%.2fs]\n", tag, c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed |= o.status == Status::Fail;
    skipped |= o.status == Status::Skip;
  }
  if (failed) return 1;
  return skipped ? 77 : 0;
}
