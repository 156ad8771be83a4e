#include "qthermo/mle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "qthermo/estimation.hpp"

namespace qthermo {

namespace {

constexpr int kScanPoints = 257;
constexpr double kTolerance = 1e-8;

double population(ModelId model, double beta, const QubitPrep& prep, ProtocolTime time) {
  return static_cast<double>(probe_state<Real>(model, InverseTemperature(beta), prep, time)(0, 0).real());
}

double log_likelihood(const OutcomeCounts& counts, double p0) {
  double value = 0.0;
  if (counts.n0 > 0) {
    value += static_cast<double>(counts.n0) * std::log(p0);
  }
  if (counts.n1 > 0) {
    value += static_cast<double>(counts.n1) * std::log1p(-p0);
  }
  return std::isnan(value) ? -std::numeric_limits<double>::infinity() : value;
}

}  // namespace

OutcomeCounts::OutcomeCounts(std::int64_t zeros, std::int64_t ones) : n0(zeros), n1(ones) {
  if (zeros < 0 || ones < 0 || zeros + ones < 1) {
    throw DomainError("OutcomeCounts: need non-negative counts with M >= 1");
  }
}

OutcomeCounts sample_population_outcomes(ModelId model, InverseTemperature beta, const QubitPrep& prep,
                                         ProtocolTime time, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) {
    throw DomainError("sample_population_outcomes: M must be at least 1");
  }
  const double p0 = std::clamp(population(model, beta.value(), prep, time), 0.0, 1.0);
  SplitMix64 engine(seed);
  std::binomial_distribution<std::int64_t> draw(shots, p0);
  const std::int64_t n0 = draw(engine);
  return OutcomeCounts(n0, shots - n0);
}

MleResult mle_beta(const OutcomeCounts& counts, ModelId model, const QubitPrep& prep, ProtocolTime time,
                   SearchInterval search) {
  if (!(search.lo > 0.0 && search.lo < search.hi) || !std::isfinite(search.hi)) {
    throw DomainError("mle_beta: need 0 < beta_lo < beta_hi");
  }
  auto p0 = [&](double b) { return population(model, b, prep, time); };

  // geometric scan: p0 varies fastest at small beta
  std::array<double, kScanPoints> grid{};
  std::array<double, kScanPoints> values{};
  const double ratio = search.hi / search.lo;
  for (int k = 0; k < kScanPoints; ++k) {
    grid[k] = k == kScanPoints - 1 ? search.hi : search.lo * std::pow(ratio, double(k) / (kScanPoints - 1));
    values[k] = p0(grid[k]);
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (*hi_it - *lo_it < 1e-12) {
    throw NoInformationError("mle_beta: p0 is constant in beta; the population record carries no information");
  }

  bool increasing = true;
  bool decreasing = true;
  for (int k = 1; k < kScanPoints; ++k) {
    increasing = increasing && values[k] >= values[k - 1];
    decreasing = decreasing && values[k] <= values[k - 1];
  }

  if (increasing || decreasing) {
    const double target = static_cast<double>(counts.n0) / static_cast<double>(counts.total());
    const double sign = increasing ? 1.0 : -1.0;
    if (sign * (target - values.front()) <= 0.0) {
      return {search.lo, true};
    }
    if (sign * (target - values.back()) >= 0.0) {
      return {search.hi, true};
    }
    int k = 1;
    while (sign * (values[k] - target) < 0.0) {
      ++k;
    }
    double a = grid[k - 1];
    double b = grid[k];
    while (b - a > kTolerance * std::max(1.0, a)) {
      const double mid = 0.5 * (a + b);
      if (sign * (p0(mid) - target) < 0.0) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return {0.5 * (a + b), false};
  }

  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScanPoints; ++k) {
    const double ll = log_likelihood(counts, values[k]);
    if (ll > best_ll) {
      best_ll = ll;
      best = k;
    }
  }
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kScanPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = log_likelihood(counts, p0(x1));
  double f2 = log_likelihood(counts, p0(x2));
  while (b - a > kTolerance * std::max(1.0, a)) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = log_likelihood(counts, p0(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = log_likelihood(counts, p0(x1));
    }
  }
  const double estimate = 0.5 * (a + b);
  const double slack = 2 * kTolerance * std::max(1.0, estimate);
  if (estimate - search.lo <= slack) {
    return {search.lo, true};
  }
  if (search.hi - estimate <= slack) {
    return {search.hi, true};
  }
  return {estimate, false};
}

CrlbReport crlb_experiment(ModelId model, InverseTemperature beta_true, const QubitPrep& prep, ProtocolTime time,
                           std::int64_t shots, int replicates, std::uint64_t seed, SearchInterval search) {
  if (replicates < 100) {
    throw DomainError("crlb_experiment: need at least 100 replicates");
  }
  if (shots < 1) {
    throw DomainError("crlb_experiment: M must be at least 1");
  }
  const double fisher = fisher_information(model, beta_true, prep, time);
  const double quantum = qfi(model, beta_true, prep, time);
  if (!(fisher > 0.0)) {
    throw NoInformationError("crlb_experiment: population Fisher information vanishes at this point");
  }

  CrlbReport report;
  report.beta_true = beta_true.value();
  report.replicates = replicates;
  report.crlb = 1.0 / (static_cast<double>(shots) * fisher);
  report.qcrlb = 1.0 / (static_cast<double>(shots) * quantum);

  // Welford accumulation over the interior estimates
  double mean = 0.0;
  double m2 = 0.0;
  int used = 0;
  for (int i = 0; i < replicates; ++i) {
    const auto counts =
        sample_population_outcomes(model, beta_true, prep, time, shots, replicate_seed(seed, std::uint64_t(i)));
    const MleResult estimate = mle_beta(counts, model, prep, time, search);
    if (estimate.at_boundary) {
      ++report.boundary_excluded;
      continue;
    }
    ++used;
    const double delta = estimate.beta_hat - mean;
    mean += delta / used;
    m2 += delta * (estimate.beta_hat - mean);
  }
  if (used < 2) {
    throw NoInformationError("crlb_experiment: fewer than two replicates produced interior estimates");
  }
  report.beta_hat_mean = mean;
  report.empirical_variance = m2 / (used - 1);
  report.ratio = report.empirical_variance / report.crlb;
  return report;
}

}  // namespace qthermo
