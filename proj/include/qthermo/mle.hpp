#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

#include "qthermo/models.hpp"

namespace qthermo {

/// Raised when the population likelihood carries no information about beta.
class NoInformationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * SplitMix64: output k is mix(seed + k * 0x9E3779B97F4A7C15).
 * Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
 */
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of replicate i: seed ^ (i * 0x9E3779B97F4A7C15).
constexpr std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t i) {
  return seed ^ (i * 0x9E3779B97F4A7C15ULL);
}

struct OutcomeCounts {
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;

  OutcomeCounts(std::int64_t zeros, std::int64_t ones);
  std::int64_t total() const { return n0 + n1; }
};

struct SearchInterval {
  double lo = 0.05;
  double hi = 50.0;
};

struct MleResult {
  double beta_hat;
  /// Set when the estimate was clamped to an interval endpoint.
  bool at_boundary;
};

struct CrlbReport {
  double beta_true = 0;
  double beta_hat_mean = 0;
  double empirical_variance = 0;
  double crlb = 0;
  double qcrlb = 0;
  double ratio = 0;
  int replicates = 0;
  /// Replicates whose estimate hit an interval endpoint; excluded from the statistics.
  int boundary_excluded = 0;
};

OutcomeCounts sample_population_outcomes(ModelId model, InverseTemperature beta, const QubitPrep& prep,
                                         ProtocolTime time, std::int64_t shots, std::uint64_t seed);

/**
 * argmax_beta n0 ln p0(beta) + n1 ln(1 - p0(beta)) on the search interval, tolerance 1e-8.
 *
 * When p0 is monotone on a 257-point scan of the interval the estimate is the root of
 * p0(beta) = n0/M by bisection, clamped (and flagged) when n0/M is out of reach. Otherwise
 * golden-section search runs on the log-likelihood around the best scan point.
 */
MleResult mle_beta(const OutcomeCounts& counts, ModelId model, const QubitPrep& prep, ProtocolTime time,
                   SearchInterval search = {});

CrlbReport crlb_experiment(ModelId model, InverseTemperature beta_true, const QubitPrep& prep, ProtocolTime time,
                           std::int64_t shots, int replicates, std::uint64_t seed, SearchInterval search = {});

}  // namespace qthermo
