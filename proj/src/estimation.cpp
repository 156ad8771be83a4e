#include "qthermo/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

namespace qthermo {

namespace {

constexpr Real kRankFloor = 64 * std::numeric_limits<Real>::epsilon();

Matrix2c<Real> widen(const Complex2x2& m) { return m.cast<std::complex<Real>>(); }

struct SldReal {
  Matrix2c<Real> matrix;
  bool rank_deficient = false;
};

SldReal sld_real(const StateJet<Real>& jet) {
  const auto eig = eig_hermitian_2x2<Real>(jet.rho);
  const Matrix2c<Real>& v = eig.vectors;
  const Matrix2c<Real> d_eigen = v.adjoint() * jet.drho * v;
  Matrix2c<Real> l_eigen = Matrix2c<Real>::Zero();
  bool deficient = false;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      const Real denom = eig.values(k) + eig.values(l);
      if (denom > Real(1e-12)) {
        l_eigen(k, l) = Real(2) * d_eigen(k, l) / denom;
      } else {
        deficient = true;
      }
    }
  }
  return {v * l_eigen * v.adjoint(), deficient};
}

// Golden-section maximization of f on [lo, hi].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

struct Point {
  double theta, phi, tau;
};

Point refine(const std::function<double(const Point&)>& objective, Point best, double best_value, double d_theta,
             double d_phi, double d_tau, double tau_max) {
  constexpr int kIterations = 60;
  for (int round = 0; round < 8; ++round) {
    const double before = best_value;
    for (int coord = 0; coord < 3; ++coord) {
      double lo, hi;
      std::function<double(double)> line;
      if (coord == 0) {
        lo = std::max(0.0, best.theta - d_theta);
        hi = std::min(std::numbers::pi, best.theta + d_theta);
        line = [&](double x) { return objective({x, best.phi, best.tau}); };
      } else if (coord == 1) {
        lo = best.phi - d_phi;
        hi = best.phi + d_phi;
        line = [&](double x) { return objective({best.theta, x, best.tau}); };
      } else {
        lo = std::max(0.0, best.tau - d_tau);
        hi = std::min(tau_max, best.tau + d_tau);
        line = [&](double x) { return objective({best.theta, best.phi, x}); };
      }
      const auto [x, value] = golden_max(line, lo, hi, kIterations);
      if (value > best_value) {
        best_value = value;
        if (coord == 0) {
          best.theta = x;
        } else if (coord == 1) {
          best.phi = x;
        } else {
          best.tau = x;
        }
      }
    }
    if (best_value - before <= 1e-14 * std::abs(best_value)) {
      break;
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Povm2

Povm2::Povm2(std::vector<Complex2x2> effects) : effects_(std::move(effects)) {
  if (effects_.empty() || effects_.size() > 8) {
    throw DomainError("Povm2: need between 1 and 8 effects");
  }
  Complex2x2 total = Complex2x2::Zero();
  for (const auto& e : effects_) {
    if (!is_hermitian(e, 1e-12)) {
      throw DomainError("Povm2: effect is not Hermitian");
    }
    if (eig_hermitian_2x2<double>(e).values(1) < -1e-12) {
      throw DomainError("Povm2: effect is not positive semidefinite");
    }
    total += e;
  }
  if ((total - Complex2x2::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("Povm2: effects do not sum to the identity");
  }
}

Povm2 Povm2::population() {
  Complex2x2 p0 = Complex2x2::Zero();
  Complex2x2 p1 = Complex2x2::Zero();
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return Povm2({p0, p1});
}

bool Povm2::is_population() const {
  if (effects_.size() != 2) {
    return false;
  }
  const Povm2 ref = population();
  return (effects_[0] - ref.effects_[0]).cwiseAbs().maxCoeff() == 0.0 &&
         (effects_[1] - ref.effects_[1]).cwiseAbs().maxCoeff() == 0.0;
}

// ---------------------------------------------------------------------------
// Fisher information

std::vector<double> outcome_probabilities(const DensityMatrix2<double>& state, const Povm2& povm) {
  std::vector<double> p;
  p.reserve(povm.size());
  for (const auto& e : povm.effects()) {
    p.push_back(std::clamp((state.matrix() * e).trace().real(), 0.0, 1.0));
  }
  return p;
}

double fisher_information(const StateJet<Real>& jet, const Povm2& povm) {
  std::array<Real, 8> p{}, dp{};
  for (std::size_t j = 0; j < povm.size(); ++j) {
    const Matrix2c<Real> e = widen(povm.effects()[j]);
    p[j] = (jet.rho * e).trace().real();
    dp[j] = (jet.drho * e).trace().real();
  }
  Real total = 0;
  for (std::size_t j = 0; j < povm.size(); ++j) {
    // probabilities at rounding level count as zero
    if (p[j] < kRankFloor) {
      if (std::abs(dp[j]) <= kRankFloor) {
        continue;
      }
      return std::numeric_limits<double>::infinity();
    }
    total += dp[j] * dp[j] / p[j];
  }
  return static_cast<double>(total);
}

double fisher_information(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time,
                          const Povm2& povm) {
  return fisher_information(probe_jet<Real>(model, beta, prep, time), povm);
}

double fisher_population_transverse_closed_form(InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  const Real b = beta.value();
  const Real tau = time.value();
  const Real c = std::cos(Real(prep.theta()));
  const Real zeta = coth(b / 2) * tau * tau;
  const Real cs = csch(b / 2);
  const Real denom = 4 * (std::exp(2 * zeta) - c * c);
  if (denom == 0) {
    return 0.0;  // tau = 0 at theta in {0, pi}: beta-independent pure state
  }
  return static_cast<double>(c * c * cs * cs * cs * cs * tau * tau * tau * tau / denom);
}

// ---------------------------------------------------------------------------
// Quantum Fisher information

double qfi_eigen(const StateJet<Real>& jet) {
  const auto eig = eig_hermitian_2x2<Real>(jet.rho);
  const Matrix2c<Real>& v = eig.vectors;
  const Matrix2c<Real> d_eigen = v.adjoint() * jet.drho * v;

  Real spectral = 0;
  for (int k = 0; k < 2; ++k) {
    const Real value = eig.values(k);
    const Real d_value = d_eigen(k, k).real();
    if (value > kRankFloor) {
      spectral += d_value * d_value / value;
    }
  }

  // <psi_l | d psi_k> = <psi_l| d rho |psi_k> / (rho_k - rho_l) for k != l.
  const Real gamma = (1 - 2 * eig.values(0)) * (1 - 2 * eig.values(0));
  const Real gap = eig.values(0) - eig.values(1);
  const Real off_sq = std::norm(d_eigen(1, 0)) + std::norm(d_eigen(0, 1));
  Real coherent;
  if (gap > Real(1e-12)) {
    coherent = 2 * gamma * off_sq / (gap * gap);
  } else {
    coherent = 2 * off_sq;  // gamma / gap^2 -> 1 at unit trace
  }
  return static_cast<double>(spectral + coherent);
}

double qfi_bloch(const StateJet<Real>& jet) {
  const Vector3<Real> r = bloch_vector<Real>(jet.rho);
  const Vector3<Real> dr = bloch_vector<Real>(jet.drho);
  const Real radial = r.dot(dr);
  const Real one_minus = 1 - r.squaredNorm();
  Real h = dr.squaredNorm();
  if (!(one_minus < Real(1e-12) && std::abs(radial) < Real(1e-12))) {
    h += radial * radial / one_minus;
  }
  return static_cast<double>(h);
}

double qfi(const StateJet<Real>& jet) {
  const double a = qfi_eigen(jet);
  const double b = qfi_bloch(jet);
  const double floor = 1e-14 * static_cast<double>(bloch_vector<Real>(jet.drho).squaredNorm());
  if (std::abs(a - b) > 1e-8 * std::max(std::abs(a), std::abs(b)) + floor) {
    throw InternalConsistencyError("qfi: eigen-decomposition and Bloch forms disagree (" + std::to_string(a) +
                                   " vs " + std::to_string(b) + ")");
  }
  return a;
}

double qfi(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  return qfi(probe_jet<Real>(model, beta, prep, time));
}

double qfi_dispersive_closed_form(InverseTemperature beta, ProtocolTime time) {
  const Real q = std::exp(-Real(beta.value()));
  const Real tau = time.value();
  const Real c = std::cos(2 * tau);
  const Real s = std::sin(tau);
  const Real d = 1 - 2 * q * c + q * q;
  const Real one_minus_q2 = 1 - q * q;
  const Real num = one_minus_q2 * one_minus_q2 + 4 * q * (1 + q * q) - 8 * q * q * c;
  return static_cast<double>(s * s * q * num / (d * d * d));
}

double fisher_dispersive_closed_form(InverseTemperature beta, ProtocolTime time) {
  const Real q = std::exp(-Real(beta.value()));
  const Real tau = time.value();
  const Real c = std::cos(2 * tau);
  const Real s = std::sin(tau);
  const Real d = 1 - 2 * q * c + q * q;
  const Real n = 1 + 2 * q - q * q - 2 * c * q * q;
  const Real m = 2 - (1 + 3 * c) * q + (1 + c) * q * q;
  return static_cast<double>(2 * s * s * n * n * q / ((1 + q) * m * d * d));
}

// ---------------------------------------------------------------------------
// Symmetric logarithmic derivative

Sld sld(const StateJet<Real>& jet) {
  const SldReal l = sld_real(jet);
  return {l.matrix.cast<std::complex<double>>(), l.rank_deficient};
}

Sld sld(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  return sld(probe_jet<Real>(model, beta, prep, time));
}

PauliCoefficients pauli_coefficients(const Complex2x2& op) {
  return {0.5 * op.trace().real(), 0.5 * (pauli::x() * op).trace().real(), 0.5 * (pauli::y() * op).trace().real(),
          0.5 * (pauli::z() * op).trace().real()};
}

SldEigenframe sld_eigenframe(const StateJet<Real>& jet) {
  const Matrix2c<Real> l = sld_real(jet).matrix;
  const Vector3<Real> b(Real(0.5) * (pauli::x<Real>() * l).trace().real(),
                        Real(0.5) * (pauli::y<Real>() * l).trace().real(),
                        Real(0.5) * (pauli::z<Real>() * l).trace().real());
  const Vector3<Real> r = bloch_vector<Real>(jet.rho);
  const Vector3<Real> n = r.norm() > Real(1e-300) ? Vector3<Real>(r.normalized()) : Vector3<Real>::UnitZ();
  Vector3<Real> e = Vector3<Real>::UnitX().cross(n);
  if (e.norm() < Real(1e-12)) {
    e = Vector3<Real>::UnitY();
  }
  e.normalize();
  const Vector3<Real> a = n.cross(e);
  return {static_cast<double>(Real(0.5) * l.trace().real()), static_cast<double>(b.dot(n)),
          static_cast<double>(b.dot(e)), static_cast<double>(b.dot(a))};
}

// ---------------------------------------------------------------------------
// Protocols

double optimal_zeta_transverse() {
  const Real e = std::numbers::e_v<Real>;
  return static_cast<double>(1 + lambert_w0<Real>(-2 / (e * e)) / 2);
}

ProtocolTime tau_opt_transverse(InverseTemperature beta) {
  const Real zeta_star = 1 + lambert_w0<Real>(-2 / (std::numbers::e_v<Real> * std::numbers::e_v<Real>)) / 2;
  return ProtocolTime(static_cast<double>(std::sqrt(zeta_star * std::tanh(Real(beta.value()) / 2))));
}

EstimationReport estimation_report(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  const auto jet = probe_jet<Real>(model, beta, prep, time);
  EstimationReport report;
  report.fisher_population = fisher_information(jet, Povm2::population());
  report.qfi = qfi(jet);
  report.sld = sld(jet).matrix;
  if (model == ModelId::Transverse) {
    report.tau_opt = tau_opt_transverse(beta).value();
  }
  report.prep_used = prep;
  return report;
}

ProtocolTime tau_opt_numeric(ModelId model, InverseTemperature beta, const QubitPrep& prep, double tau_max) {
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
    throw DomainError("tau_opt_numeric: tau_max must be positive");
  }
  constexpr int kTau = 257;
  const double d_tau = tau_max / (kTau - 1);
  const Povm2 population = Povm2::population();
  const std::function<double(double)> fisher = [&](double tau) {
    return fisher_information(probe_jet<Real>(model, beta, prep, ProtocolTime(tau)), population);
  };
  int best = 0;
  double best_value = -1;
  for (int k = 0; k < kTau; ++k) {
    const double f = fisher(k * d_tau);
    if (f > best_value) {
      best_value = f;
      best = k;
    }
  }
  if (!(best_value > 0.0)) {
    throw DomainError("tau_opt_numeric: population Fisher information vanishes for every tau");
  }
  const auto [tau, value] = golden_max(fisher, std::max(0.0, (best - 1) * d_tau), std::min(tau_max, (best + 1) * d_tau), 60);
  return ProtocolTime(value >= best_value ? tau : best * d_tau);
}

ProtocolOptimum optimize_protocol(ModelId model, InverseTemperature beta, double tau_max) {
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
    throw DomainError("optimize_protocol: tau_max must be positive");
  }
  constexpr int kTheta = 33, kPhi = 33, kTau = 257;
  const double d_theta = std::numbers::pi / (kTheta - 1);
  const double d_phi = 2.0 * std::numbers::pi / kPhi;
  const double d_tau = tau_max / (kTau - 1);
  const Povm2 population = Povm2::population();

  auto jet_at = [&](const Point& p) {
    return probe_jet<Real>(model, beta, QubitPrep::wrapped(p.theta, p.phi), ProtocolTime(p.tau));
  };
  const std::function<double(const Point&)> fisher = [&](const Point& p) {
    return fisher_information(jet_at(p), population);
  };
  const std::function<double(const Point&)> quantum = [&](const Point& p) { return qfi(jet_at(p)); };

  Point best_f{0, 0, 0}, best_h{0, 0, 0};
  double value_f = -1, value_h = -1;
  for (int i = 0; i < kTheta; ++i) {
    for (int j = 0; j < kPhi; ++j) {
      for (int k = 0; k < kTau; ++k) {
        const Point p{i * d_theta, j * d_phi, k * d_tau};
        const auto jet = jet_at(p);
        const double f = fisher_information(jet, population);
        const double h = qfi(jet);
        if (f > value_f) {
          value_f = f;
          best_f = p;
        }
        if (h > value_h) {
          value_h = h;
          best_h = p;
        }
      }
    }
  }

  best_f = refine(fisher, best_f, value_f, d_theta, d_phi, d_tau, tau_max);
  best_h = refine(quantum, best_h, quantum(best_h), d_theta, d_phi, d_tau, tau_max);

  ProtocolOptimum out;
  const QubitPrep prep_f = QubitPrep::wrapped(best_f.theta, best_f.phi);
  out.fisher = estimation_report(model, beta, prep_f, ProtocolTime(best_f.tau));
  out.fisher.tau_opt = best_f.tau;
  out.qfi_prep = QubitPrep::wrapped(best_h.theta, best_h.phi);
  out.qfi_tau = best_h.tau;
  out.qfi_value = quantum(best_h);
  return out;
}

double fi_deficit(ModelId model, InverseTemperature beta, ProtocolTime time) {
  const QubitPrep prep(0.0, 0.0);
  const auto jet = probe_jet<Real>(model, beta, prep, time);
  const double h = qfi(jet);
  if (!(h > 1e-24)) {
    throw DomainError("fi_deficit: quantum Fisher information vanishes at tau = " + std::to_string(time.value()));
  }
  const double f = fisher_information(jet, Povm2::population());
  double deficit = (h - f) / h;
  if (deficit < 0.0 && deficit >= -1e-12) {
    deficit = 0.0;
  }
  return deficit;
}

}  // namespace qthermo
