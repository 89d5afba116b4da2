#include "vmprox/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vmprox/errors.hpp"
#include "vmprox/sampling.hpp"

namespace vmprox::oracle {

namespace {

double log_one_plus_exp(double x) {
  // log(1 + e^x) = max(x, 0) + log(1 + e^{-|x|})
  return std::max(x, 0.0) + std::log(1.0 + std::exp(-std::abs(x)));
}

}  // namespace

double TinyInstance::component_value(std::size_t i, const Vector& w) const {
  const double z = features.row(static_cast<Eigen::Index>(i)).dot(w);
  const double ridge_term = 0.5 * ridge * w.squaredNorm();
  if (loss == Loss::Squared) {
    const double r = labels[static_cast<Eigen::Index>(i)] - z;
    return 0.5 * r * r + ridge_term;
  }
  return log_one_plus_exp(-labels[static_cast<Eigen::Index>(i)] * z) + ridge_term;
}

Vector TinyInstance::component_gradient(std::size_t i, const Vector& w) const {
  const auto row = static_cast<Eigen::Index>(i);
  const Vector a = features.row(row).transpose();
  const double z = a.dot(w);
  const double b = labels[row];
  double coef = 0.0;
  if (loss == Loss::Squared) {
    coef = z - b;
  } else {
    // d/dz log(1 + exp(-b z)) = -b exp(-b z) / (1 + exp(-b z)) = -b / (1 + exp(b z))
    coef = -b / (1.0 + std::exp(b * z));
  }
  return coef * a + ridge * w;
}

double TinyInstance::smooth_value(const Vector& w) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n(); ++i) acc += component_value(i, w);
  return acc / static_cast<double>(n());
}

Vector TinyInstance::full_gradient(const Vector& w) const {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(d()));
  for (std::size_t i = 0; i < n(); ++i) g += component_gradient(i, w);
  return g / static_cast<double>(n());
}

double TinyInstance::objective(const Vector& w) const {
  return smooth_value(w) + l1 * w.cwiseAbs().sum();
}

double TinyInstance::component_lipschitz(std::size_t i) const {
  const double sq = features.row(static_cast<Eigen::Index>(i)).squaredNorm();
  return (loss == Loss::Squared ? sq : sq / 4.0) + ridge;
}

TinyInstance make_tiny_instance(std::size_t n, std::size_t d, Loss loss,
                                double ridge, double l1, std::uint64_t seed) {
  RngStream rng(seed);
  TinyInstance inst;
  inst.loss = loss;
  inst.ridge = ridge;
  inst.l1 = l1;
  inst.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  inst.labels.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < inst.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.features.cols(); ++j) {
      inst.features(i, j) = rng.normal();
    }
    if (loss == Loss::Squared) {
      inst.labels[i] = rng.normal();
    } else {
      inst.labels[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    }
  }
  return inst;
}

double TinySmooth::component_value(std::size_t i, const Vector& w) const {
  return inst_.component_value(i, w);
}

void TinySmooth::add_component_gradient(std::size_t i, const Vector& w,
                                        double scale, Vector& out) const {
  out += scale * inst_.component_gradient(i, w);
}

SmoothnessProfile TinySmooth::smoothness() const {
  std::vector<double> l(inst_.n());
  for (std::size_t i = 0; i < inst_.n(); ++i) l[i] = inst_.component_lipschitz(i);
  return make_profile(std::move(l));
}

Dataset make_synthetic_classification(std::size_t n, std::size_t d,
                                      std::uint64_t seed,
                                      const SyntheticOptions& options) {
  RngStream rng(seed);
  Vector planted(static_cast<Eigen::Index>(d));
  for (auto& x : planted) x = rng.normal();

  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::vector<double> labels;
  indices.reserve(n * d);
  values.reserve(n * d);
  Vector a(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : a) x = rng.normal();
    if (options.unit_rows) a /= a.norm();
    double label = a.dot(planted) >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform01() < options.label_noise) label = -label;
    for (std::size_t j = 0; j < d; ++j) {
      indices.push_back(static_cast<std::uint32_t>(j));
      values.push_back(a[static_cast<Eigen::Index>(j)]);
    }
    row_ptr.push_back(values.size());
    labels.push_back(label);
  }
  return Dataset(std::move(row_ptr), std::move(indices), std::move(values),
                 std::move(labels), d);
}

Matrix dense_features(const Dataset& ds) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(ds.n()), static_cast<Eigen::Index>(ds.d()));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      a(static_cast<Eigen::Index>(i), row.indices[k]) = row.values[k];
    }
  }
  return a;
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& w, double h) {
  Vector g(w.size());
  Vector probe = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + h;
    const double up = f(probe);
    probe[i] = w[i] - h;
    const double down = f(probe);
    probe[i] = w[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double prox_1d_oracle(double w, double u, double l1, double l2) {
  if (!(u > 0.0)) throw MetricError("oracle stepsize must be positive");
  const auto phi = [&](double y) {
    return (y - w) * (y - w) / (2.0 * u) + l1 * std::abs(y) + 0.5 * l2 * y * y;
  };
  // 0 is optimal iff |w / u| <= l1 (subgradient of the kink contains w/u).
  if (std::abs(w) / u <= l1) return 0.0;

  const double radius = 10.0 * (1.0 + std::abs(w));
  double lo = w - radius, hi = w + radius;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = phi(x1), f2 = phi(x2);
  while (hi - lo > 1e-6 * (1.0 + std::abs(w))) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = phi(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = phi(x2);
    }
  }
  // Function values stop resolving the minimizer near 1e-8 * sqrt(u); finish
  // by bisection on the sign of the (monotone) derivative inside the bracket.
  const auto slope = [&](double y) {
    const double sgn = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
    return (y - w) / u + l1 * sgn + l2 * y;
  };
  const double pad = 1e-6 * (1.0 + std::abs(w));
  lo -= pad;
  hi += pad;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (slope(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double metric_coordinate_oracle(double s, double y, double u_prev, double omega,
                                double lower, double upper) {
  const auto obj = [&](double u) {
    return (s - u * y) * (s - u * y) + omega * (u - u_prev) * (u - u_prev);
  };
  constexpr int points = 1000;
  double lo = lower, hi = upper;
  double best = lower;
  while (true) {
    const double step = (hi - lo) / points;
    double best_val = obj(lo);
    best = lo;
    for (int k = 1; k <= points; ++k) {
      const double u = k == points ? hi : lo + k * step;
      const double val = obj(u);
      if (val < best_val) {
        best_val = val;
        best = u;
      }
    }
    if (step < 1e-12 * (1.0 + std::abs(best))) break;
    lo = std::max(lower, best - step);
    hi = std::min(upper, best + step);
  }
  return best;
}

namespace {

struct Accumulator {
  Vector sum_v;
  Vector sum_v_sq;  // Monte-Carlo second moments of v entries
  Vector sum_grad;
  double variance = 0.0;
  double variance_sq = 0.0;
  double step_sq = 0.0;
  double next_step = 0.0;
  double weight = 0.0;
  std::size_t paths = 0;
};

Vector oracle_prox(const TinyInstance& inst, const Vector& x, const Vector& u) {
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = prox_1d_oracle(x[i], u[i], inst.l1);
  return y;
}

Vector estimator_step(const EnumerationInput& in, const std::vector<std::size_t>& batch,
                      const Vector& v_prev, const Vector& w, const Vector& w_prev,
                      const Vector& anchor, const Vector& anchor_grad) {
  const auto& inst = *in.instance;
  const double n = static_cast<double>(inst.n());
  Vector acc = Vector::Zero(w.size());
  for (auto i : batch) {
    const double weight = 1.0 / (in.q[static_cast<Eigen::Index>(i)] * n);
    if (in.estimator == Estimator::Recursive) {
      acc += weight * (inst.component_gradient(i, w) - inst.component_gradient(i, w_prev));
    } else {
      acc += weight * (inst.component_gradient(i, w) - inst.component_gradient(i, anchor));
    }
  }
  acc /= static_cast<double>(batch.size());
  return in.estimator == Estimator::Recursive ? Vector(acc + v_prev) : Vector(acc + anchor_grad);
}

void add_leaf(const EnumerationInput& in, double p, const Vector& v, const Vector& w,
              const Vector& w_prev, Accumulator& acc) {
  const auto& inst = *in.instance;
  const Vector g = inst.full_gradient(w);
  const Vector w_next = oracle_prox(inst, w - in.u.cwiseProduct(v), in.u);
  const double var = (v - g).squaredNorm();
  acc.sum_v += p * v;
  acc.sum_v_sq += p * v.cwiseAbs2();
  acc.sum_grad += p * g;
  acc.variance += p * var;
  acc.variance_sq += p * var * var;
  acc.step_sq += p * (w - w_prev).squaredNorm();
  acc.next_step += p * ((w_next - w).array().square() / in.u.array()).sum();
  acc.weight += p;
  ++acc.paths;
}

void recurse(const EnumerationInput& in, int s, double p, const Vector& v_prev,
             const Vector& w, const Vector& w_prev, const Vector& anchor,
             const Vector& anchor_grad, Accumulator& acc) {
  const std::size_t n = in.instance->n();
  std::vector<std::size_t> batch(in.b, 0);
  while (true) {
    double weight = p;
    for (auto i : batch) weight *= in.q[static_cast<Eigen::Index>(i)];
    const Vector v = estimator_step(in, batch, v_prev, w, w_prev, anchor, anchor_grad);
    if (s == in.depth) {
      add_leaf(in, weight, v, w, w_prev, acc);
    } else {
      const Vector w_next = oracle_prox(*in.instance, w - in.u.cwiseProduct(v), in.u);
      recurse(in, s + 1, weight, v, w_next, w, anchor, anchor_grad, acc);
    }
    std::size_t pos = 0;
    while (pos < in.b && ++batch[pos] == n) batch[pos++] = 0;
    if (pos == in.b) break;
  }
}

Accumulator make_accumulator(Eigen::Index d) {
  Accumulator acc;
  acc.sum_v = Vector::Zero(d);
  acc.sum_v_sq = Vector::Zero(d);
  acc.sum_grad = Vector::Zero(d);
  return acc;
}

void check_input(const EnumerationInput& in) {
  if (in.instance == nullptr) throw ConfigError("enumeration needs an instance");
  const auto n = static_cast<Eigen::Index>(in.instance->n());
  const auto d = static_cast<Eigen::Index>(in.instance->d());
  if (in.q.size() != n || in.u.size() != d || in.depth < 1 || in.b < 1) {
    throw ConfigError("enumeration input has inconsistent sizes");
  }
  if (std::abs(in.q.sum() - 1.0) > 1e-12) throw ConfigError("q must sum to 1");
}

}  // namespace

Moments enumerate_expectation(const EnumerationInput& in) {
  check_input(in);
  const double paths = std::pow(static_cast<double>(in.instance->n()),
                                static_cast<double>(in.b) * in.depth);
  if (paths > 1e6) {
    throw PathExplosionError("enumeration needs " + std::to_string(paths) + " paths");
  }
  const auto d = static_cast<Eigen::Index>(in.instance->d());
  const Vector start = in.start.size() ? in.start : Vector::Zero(d);
  const Vector g0 = in.instance->full_gradient(start);
  auto acc = make_accumulator(d);
  recurse(in, 1, 1.0, g0, start, start, start, g0, acc);

  Moments m;
  m.paths = acc.paths;
  m.mean_v = acc.sum_v / acc.weight;
  m.mean_grad = acc.sum_grad / acc.weight;
  m.variance = acc.variance / acc.weight;
  m.step_sq = acc.step_sq / acc.weight;
  m.next_step_metric_sq = acc.next_step / acc.weight;
  m.mean_v_se = Vector::Zero(d);
  return m;
}

Moments monte_carlo_expectation(const EnumerationInput& in, std::size_t samples,
                                std::uint64_t seed) {
  check_input(in);
  const auto d = static_cast<Eigen::Index>(in.instance->d());
  const std::size_t n = in.instance->n();
  std::vector<double> cdf(n);
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) cdf[i] = (c += in.q[static_cast<Eigen::Index>(i)]);

  RngStream rng(seed);
  const auto draw = [&] {
    const double r = rng.uniform01() * c;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1);
  };

  const Vector start = in.start.size() ? in.start : Vector::Zero(d);
  const Vector g0 = in.instance->full_gradient(start);
  auto acc = make_accumulator(d);
  const double p = 1.0 / static_cast<double>(samples);
  std::vector<std::size_t> batch(in.b);
  for (std::size_t r = 0; r < samples; ++r) {
    Vector w_prev = start, w = start, v = g0;
    for (int s = 1;; ++s) {
      for (auto& i : batch) i = draw();
      v = estimator_step(in, batch, v, w, w_prev, start, g0);
      if (s == in.depth) break;
      Vector w_next = oracle_prox(*in.instance, w - in.u.cwiseProduct(v), in.u);
      w_prev = std::move(w);
      w = std::move(w_next);
    }
    add_leaf(in, p, v, w, w_prev, acc);
  }

  Moments m;
  m.paths = acc.paths;
  m.mean_v = acc.sum_v;
  m.mean_grad = acc.sum_grad;
  m.variance = acc.variance;
  m.step_sq = acc.step_sq;
  m.next_step_metric_sq = acc.next_step;
  const double dn = static_cast<double>(samples);
  m.mean_v_se = ((acc.sum_v_sq - m.mean_v.cwiseAbs2()).cwiseMax(0.0) / dn).cwiseSqrt();
  m.variance_se = std::sqrt(std::max(0.0, acc.variance_sq - m.variance * m.variance) / dn);
  return m;
}

double tiny_l_omega(const TinyInstance& instance, const Vector& q) {
  double l = 0.0;
  const double n = static_cast<double>(instance.n());
  for (std::size_t i = 0; i < instance.n(); ++i) {
    l = std::max(l, instance.component_lipschitz(i) / (n * q[static_cast<Eigen::Index>(i)]));
  }
  return l;
}

double logistic_1d_minimizer(const Vector& a, const Vector& b, double l2,
                             double l1) {
  const double n = static_cast<double>(a.size());
  // derivative of the smooth part
  const auto dF = [&](double w) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      acc += -b[i] * a[i] / (1.0 + std::exp(b[i] * a[i] * w));
    }
    return acc / n + l2 * w;
  };
  const double g0 = dF(0.0);
  if (std::abs(g0) <= l1) return 0.0;
  // Optimum lies on the side where -g0 points; dF + sign * l1 is increasing.
  const double sign = g0 < 0.0 ? 1.0 : -1.0;
  const auto h = [&](double w) { return dF(w) + sign * l1; };
  double lo = 0.0, hi = sign;
  while (sign * h(hi) < 0.0) hi *= 2.0;
  if (hi < lo) std::swap(lo, hi);
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (h(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace vmprox::oracle
