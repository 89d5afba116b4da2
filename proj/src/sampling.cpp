#include "vmprox/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "vmprox/errors.hpp"

namespace vmprox {

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t range = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return static_cast<std::size_t>(x % range);
}

double RngStream::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ splitmix64(~index));
}

std::string to_string(SamplingScheme scheme) {
  return scheme == SamplingScheme::Uniform ? "uniform" : "importance";
}

SamplingScheme parse_sampling_scheme(const std::string& name) {
  if (name == "uniform") return SamplingScheme::Uniform;
  if (name == "importance") return SamplingScheme::Importance;
  throw ConfigError("unknown sampling scheme '" + name + "'");
}

SamplingDistribution::SamplingDistribution(std::vector<double> q,
                                           SamplingScheme scheme, double l_omega)
    : q_(std::move(q)), scheme_(scheme), l_omega_(l_omega) {
  const std::size_t n = q_.size();
  if (n == 0) throw ConfigError("sampling distribution is empty");
  for (double qi : q_) {
    if (!(qi > 0.0)) throw ConfigError("sampling probabilities must be positive");
  }
  if (scheme_ == SamplingScheme::Uniform) return;

  // Vose's alias method.
  alias_prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = q_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) alias_prob_[i] = 1.0;
  for (auto i : small) alias_prob_[i] = 1.0;
}

std::size_t SamplingDistribution::draw(RngStream& rng) const {
  const std::size_t i = rng.uniform_index(q_.size());
  if (scheme_ == SamplingScheme::Uniform) return i;
  return rng.uniform01() < alias_prob_[i] ? i : alias_[i];
}

SamplingDistribution build_distribution(const SmoothnessProfile& profile,
                                        SamplingScheme scheme) {
  const auto& l = profile.per_component;
  const std::size_t n = l.size();
  if (n == 0) throw ConfigError("empty smoothness profile");
  for (double li : l) {
    if (!(li > 0.0)) throw ConfigError("smoothness constants must be positive");
  }
  const double dn = static_cast<double>(n);
  std::vector<double> q(n);
  if (scheme == SamplingScheme::Uniform) {
    std::fill(q.begin(), q.end(), 1.0 / dn);
    return SamplingDistribution(std::move(q), scheme, profile.max);
  }
  const double total = std::accumulate(l.begin(), l.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) q[i] = l[i] / total;
  return SamplingDistribution(std::move(q), scheme, total / dn);
}

void sample_minibatch(const SamplingDistribution& dist, std::size_t b,
                      RngStream& rng, std::vector<std::size_t>& out) {
  out.resize(b);
  for (auto& i : out) i = dist.draw(rng);
}

std::vector<std::size_t> sample_minibatch(const SamplingDistribution& dist,
                                          std::size_t b, RngStream& rng) {
  std::vector<std::size_t> out;
  sample_minibatch(dist, b, rng, out);
  return out;
}

int sample_inner_length(int m, RngStream& rng) {
  if (m < 1) throw ConfigError("m must be >= 1");
  return 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(m)));
}

}  // namespace vmprox
