#include "qthermo/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qthermo/estimation.hpp"

namespace qthermo::oracle {

namespace {

using Cx = std::complex<Real>;

Vector2c<Real> prep_vector(const QubitPrep& prep) {
  Vector2c<Real> psi;
  psi << Cx(std::cos(Real(prep.theta()) / 2)), std::polar(std::sin(Real(prep.theta()) / 2), Real(prep.phi()));
  return psi;
}

/// exp(-i angle sigma_x)
Matrix2c<Real> x_rotation(Real angle) {
  Matrix2c<Real> u;
  u << Cx(std::cos(angle)), Cx(0, -std::sin(angle)), Cx(0, -std::sin(angle)), Cx(std::cos(angle));
  return u;
}

Matrix2c<Real> hadamard() {
  Matrix2c<Real> h;
  const Real s = 1 / std::numbers::sqrt2_v<Real>;
  h << s, s, s, -s;
  return h;
}

/// exp(-i M t) for M = [[-Delta/2, g], [g, Delta/2]], the traceless part of a JC manifold block.
Matrix2c<Real> manifold_propagator(Real delta, Real coupling, Real t) {
  const Real omega = std::sqrt(delta * delta / 4 + coupling * coupling);
  const Real c = std::cos(omega * t);
  const Real k = omega > 0 ? std::sin(omega * t) / omega : t;
  Matrix2c<Real> u;
  u << Cx(c, delta / 2 * k), Cx(0, -coupling * k), Cx(0, -coupling * k), Cx(c, -delta / 2 * k);
  return u;
}

}  // namespace

FockTruncation::FockTruncation(int dimension, InverseTemperature beta) : dim(dimension) {
  if (dimension < 1) {
    throw DomainError("FockTruncation: dimension must be positive");
  }
  tail_bound = std::exp(-beta.value() * dimension);
}

FockTruncation FockTruncation::for_tail(InverseTemperature beta, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("FockTruncation: epsilon must lie in (0, 1)");
  }
  const int n = static_cast<int>(std::ceil(std::log(1.0 / epsilon) / beta.value())) + 10;
  return FockTruncation(n, beta);
}

FullJcParams::FullJcParams(double lambda, double detuning, double t)
    : lambda_coupling(lambda), delta(detuning), time(t) {
  if (!(lambda > 0.0) || !std::isfinite(detuning) || !(t > 0.0)) {
    throw DomainError("FullJcParams: need lambda > 0, finite Delta and t > 0");
  }
}

bool FullJcParams::dispersive_regime(InverseTemperature beta) const {
  return delta * delta / 4 > 100 * lambda_coupling * lambda_coupling * (beta.mean_occupation() + 1);
}

DensityMatrix2<Real> probe_state_transverse_quadrature(InverseTemperature beta, const QubitPrep& prep,
                                                       ProtocolTime time, double alpha,
                                                       const QuadratureRule<Real>& rule) {
  if (rule.order < 32) {
    throw DomainError("probe_state_transverse_quadrature: order must be at least 32");
  }
  const Vector2c<Real> psi = prep_vector(prep);
  const Matrix2c<Real> rho0 = psi * psi.adjoint();
  // variance nbar + 1/2 = coth(beta/2)/2, so x = sqrt(coth(beta/2)) u + sqrt(2) alpha for u ~ e^{-u^2}
  const Real spread = std::sqrt(coth(Real(beta.value()) / 2));
  const Real mean = std::numbers::sqrt2_v<Real> * Real(alpha);
  const Real tau = time.value();
  const Real norm = 1 / std::sqrt(std::numbers::pi_v<Real>);
  Matrix2c<Real> rho = Matrix2c<Real>::Zero();
  for (int k = 0; k < rule.order; ++k) {
    const Real x = spread * rule.nodes[k] + mean;
    const Matrix2c<Real> u = x_rotation(tau * x);
    rho += (rule.weights[k] * norm) * (u * rho0 * u.adjoint());
  }
  return DensityMatrix2<Real>(rho);
}

DensityMatrix2<Real> probe_state_transverse_quadrature(InverseTemperature beta, const QubitPrep& prep,
                                                       ProtocolTime time, double alpha, int order) {
  return probe_state_transverse_quadrature(beta, prep, time, alpha, gauss_hermite_rule<Real>(order));
}

DensityMatrix2<Real> probe_state_dispersive_focksum(InverseTemperature beta, const QubitPrep& prep,
                                                    ProtocolTime time, const FockTruncation& trunc) {
  if (trunc.tail_bound > 1e-15) {
    throw DomainError("probe_state_dispersive_focksum: truncation tail exceeds 1e-15");
  }
  const Vector2c<Real> psi = prep_vector(prep);
  const Matrix2c<Real> rho0 = psi * psi.adjoint();
  const Real q = std::exp(-Real(beta.value()));
  const Real tau = time.value();
  Matrix2c<Real> rho = Matrix2c<Real>::Zero();
  Real weight = 1 - q;
  Real retained = 0;
  for (int n = 0; n < trunc.dim; ++n) {
    const Matrix2c<Real> u = x_rotation(tau * n);
    rho += weight * (u * rho0 * u.adjoint());
    retained += weight;
    weight *= q;
  }
  return DensityMatrix2<Real>(rho / retained);
}

DensityMatrix2<Real> full_jc_probe_state(InverseTemperature beta, const QubitPrep& prep, const FullJcParams& params,
                                         const FockTruncation& trunc) {
  const Real q = std::exp(-Real(beta.value()));
  const int dim = trunc.dim;
  if (dim < 2) {
    throw TruncationError("full_jc_probe_state: need at least two Fock levels");
  }
  const Real top_weight = (1 - q) * std::pow(q, dim - 2) * (1 + q);
  if (top_weight > Real(1e-10)) {
    throw TruncationError("full_jc_probe_state: top Fock levels carry " +
                          std::to_string(static_cast<double>(top_weight)) + " thermal weight; increase dim");
  }
  const Real lambda = params.lambda_coupling;
  const Real delta = params.delta;
  const Real t = params.time;

  const Matrix2c<Real> had = hadamard();
  const Vector2c<Real> psi = had * prep_vector(prep);
  const Cx c0 = psi(0), c1 = psi(1);

  // Manifold m = {|1,m>, |0,m+1>}; m = -1 is the lone |0,0> with coupling 0.
  auto block = [&](int m) { return manifold_propagator(delta, lambda * std::sqrt(Real(m + 1)), t); };

  Matrix2c<Real> rho = Matrix2c<Real>::Zero();
  Real weight = 1 - q;
  Real retained = 0;
  Real worst_defect = 0;
  for (int n = 0; n < dim; ++n) {
    const Matrix2c<Real> upper = block(n);      // acts on |1,n>
    const Matrix2c<Real> lower = block(n - 1);  // acts on |0,n>
    const Cx a = upper(0, 0), b = upper(1, 0);
    const Cx c = lower(0, 1), d = lower(1, 1);
    worst_defect = std::max(worst_defect, std::abs(std::norm(a) + std::norm(b) - 1));
    worst_defect = std::max(worst_defect, std::abs(std::norm(c) + std::norm(d) - 1));

    // oscillator level n: qubit (c0 d, c1 a); level n+1: (c1 b, 0); level n-1: (0, c0 c)
    Vector2c<Real> same;
    same << c0 * d, c1 * a;
    rho += weight * (same * same.adjoint());
    rho(0, 0) += weight * std::norm(c1 * b);
    rho(1, 1) += weight * std::norm(c0 * c);
    retained += weight;
    weight *= q;
  }
  if (worst_defect > Real(1e-11)) {
    throw InternalConsistencyError("full_jc_probe_state: manifold propagator not unitary");
  }
  return DensityMatrix2<Real>(had * (rho / retained) * had);
}

double default_step(InverseTemperature beta) {
  return std::min(1e-3 * std::max(1.0, beta.value()), beta.value() / 4);
}

namespace {

void check_step(InverseTemperature beta, double h) {
  const double scale = std::max(1.0, beta.value());
  if (!(h >= 1e-7 * scale && h <= 1e-3 * scale)) {
    throw DomainError("finite-difference step must lie in [1e-7, 1e-3] max(1, beta)");
  }
  if (beta.value() - 2 * h <= 0.0) {
    throw DomainError("finite-difference stencil leaves beta > 0");
  }
}

StateFunction model_state(ModelId model, const QubitPrep& prep, ProtocolTime time) {
  return [=](Real b) { return probe_state<Real>(model, InverseTemperature(static_cast<double>(b)), prep, time).matrix(); };
}

}  // namespace

double qfi_numeric(const StateFunction& state, InverseTemperature beta, double h) {
  check_step(beta, h);
  const Real b = beta.value();
  StateJet<Real> jet{state(b), finite_diff(state, b, Real(h))};
  jet.drho = (jet.drho + jet.drho.adjoint().eval()) / Real(2);
  return qfi_eigen(jet);
}

double qfi_numeric(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time, double h) {
  return qfi_numeric(model_state(model, prep, time), beta, h);
}

double fisher_population_numeric(const StateFunction& state, InverseTemperature beta, double h) {
  check_step(beta, h);
  const Real b = beta.value();
  const Real p0 = state(b)(0, 0).real();
  const Real dp0 = finite_diff([&](Real x) { return state(x)(0, 0).real(); }, b, Real(h));
  const Real var = p0 * (1 - p0);
  if (var < Real(1e-300)) {
    return 0.0;
  }
  return static_cast<double>(dp0 * dp0 / var);
}

double fisher_population_numeric(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time,
                                 double h) {
  return fisher_population_numeric(model_state(model, prep, time), beta, h);
}

DispersiveLimitScan dispersive_limit_scan(InverseTemperature beta, const QubitPrep& prep, ProtocolTime tau,
                                          double lambda, const std::vector<double>& detunings) {
  DispersiveLimitScan scan;
  scan.qfi_dispersive = qfi(ModelId::Dispersive, beta, prep, tau);
  // Fixed truncation across the finite-difference stencil, sized for the smallest beta it visits.
  const double h = default_step(beta);
  const FockTruncation trunc = FockTruncation::for_tail(InverseTemperature(beta.value() - 2 * h), 1e-15);
  for (const double delta : detunings) {
    DispersiveLimitPoint point{};
    point.delta = delta;
    for (int multiplier = 1; multiplier <= 2; ++multiplier) {
      const double g_eff = multiplier * lambda * lambda / delta;
      const FullJcParams params(lambda, delta, tau.value() / g_eff);
      const StateFunction state = [&](Real b) {
        return full_jc_probe_state(InverseTemperature(static_cast<double>(b)), prep, params, trunc).matrix();
      };
      const double value = qfi_numeric(state, beta, h);
      const double gap = std::abs(value - scan.qfi_dispersive) / scan.qfi_dispersive;
      if (multiplier == 1) {
        point.qfi_jc_lambda2_over_delta = value;
        point.gap_lambda2_over_delta = gap;
      } else {
        point.qfi_jc_two_lambda2_over_delta = value;
        point.gap_two_lambda2_over_delta = gap;
      }
    }
    scan.points.push_back(point);
  }
  const auto& last = scan.points.back();
  scan.winning_multiplier = last.gap_lambda2_over_delta <= last.gap_two_lambda2_over_delta ? 1 : 2;
  return scan;
}

}  // namespace qthermo::oracle
