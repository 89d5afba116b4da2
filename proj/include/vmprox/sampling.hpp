#ifndef VMPROX_SAMPLING_HPP
#define VMPROX_SAMPLING_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vmprox/dataset.hpp"

namespace vmprox {

/// Seeded generator whose draw sequence is identical on every platform:
/// mt19937_64 output is fixed by the standard and all mappings to doubles
/// and indices are done here rather than by <random> distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on {0, ..., n - 1}; n >= 1.
  std::size_t uniform_index(std::size_t n);
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// child_seed = hash(parent_seed, index), a splitmix64 mix of both.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

enum class SamplingScheme { Uniform, Importance };

std::string to_string(SamplingScheme scheme);
SamplingScheme parse_sampling_scheme(const std::string& name);

/// Distribution Q over component indices with L_Omega = max_i L_i / (n q_i).
class SamplingDistribution {
 public:
  SamplingDistribution(std::vector<double> q, SamplingScheme scheme,
                       double l_omega);

  const std::vector<double>& q() const { return q_; }
  SamplingScheme scheme() const { return scheme_; }
  double l_omega() const { return l_omega_; }
  std::size_t size() const { return q_.size(); }

  /// One draw i ~ Q (alias method; direct index draw when uniform).
  std::size_t draw(RngStream& rng) const;

 private:
  std::vector<double> q_;
  SamplingScheme scheme_;
  double l_omega_;
  std::vector<double> alias_prob_;
  std::vector<std::size_t> alias_;
};

/// Uniform: q_i = 1/n. Importance: q_i = L_i / sum_j L_j.
SamplingDistribution build_distribution(const SmoothnessProfile& profile,
                                        SamplingScheme scheme);

/// b i.i.d. draws with replacement.
std::vector<std::size_t> sample_minibatch(const SamplingDistribution& dist,
                                          std::size_t b, RngStream& rng);
void sample_minibatch(const SamplingDistribution& dist, std::size_t b,
                      RngStream& rng, std::vector<std::size_t>& out);

/// Uniform draw from {1, ..., m}.
int sample_inner_length(int m, RngStream& rng);

}  // namespace vmprox

#endif  // VMPROX_SAMPLING_HPP
