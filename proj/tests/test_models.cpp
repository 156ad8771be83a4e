#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qthermo/models.hpp"

using namespace qthermo;

namespace {
constexpr double kPi = std::numbers::pi;

double max_diff(const Complex2x2& a, const Complex2x2& b) { return (a - b).cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("parameter types validate their ranges") {
  CHECK_THROWS_AS(InverseTemperature(0.0), DomainError);
  CHECK_THROWS_AS(InverseTemperature(-1.0), DomainError);
  CHECK_THROWS_AS((void)InverseTemperature(INFINITY), DomainError);
  CHECK(InverseTemperature(std::log(2.0)).mean_occupation() == doctest::Approx(1.0));
  CHECK_THROWS_AS(QubitPrep(-0.1, 0.0), DomainError);
  CHECK_THROWS_AS(QubitPrep(0.0, 2 * kPi), DomainError);
  CHECK_THROWS_AS(ProtocolTime(-1e-9), DomainError);
  CHECK(ProtocolTime(0.0).value() == 0.0);
  CHECK(parse_model("dispersive") == ModelId::Dispersive);
  CHECK(to_string(ModelId::Transverse) == "transverse");
  CHECK_THROWS_AS(parse_model("jc"), DomainError);
}

TEST_CASE("QubitPrep::wrapped maps angles to the same ray") {
  const QubitPrep p = QubitPrep::wrapped(kPi + 0.3, 0.2);
  CHECK(p.theta() == doctest::Approx(kPi - 0.3));
  CHECK(p.phi() == doctest::Approx(kPi + 0.2));
  const auto a = pure_qubit_state(p).bloch();
  CHECK(a(2) == doctest::Approx(std::cos(kPi + 0.3)));
  CHECK(a(0) == doctest::Approx(std::sin(kPi + 0.3) * std::cos(0.2)));
  CHECK(QubitPrep::wrapped(0.1, -0.5).phi() == doctest::Approx(2 * kPi - 0.5));
}

TEST_CASE("DensityMatrix2 validates invariants") {
  Complex2x2 m = Complex2x2::Zero();
  m(0, 0) = 0.7;
  m(1, 1) = 0.3;
  CHECK_NOTHROW((void)DensityMatrix2<double>(m));
  m(1, 1) = 0.4;
  CHECK_THROWS_AS((void)DensityMatrix2<double>(m), DomainError);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  CHECK_THROWS_AS((void)DensityMatrix2<double>(m), DomainError);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  m(1, 0) = 0.2;
  CHECK_THROWS_AS((void)DensityMatrix2<double>(m), DomainError);
}

TEST_CASE("pure_qubit_state examples") {
  Complex2x2 up = Complex2x2::Zero();
  up(0, 0) = 1;
  CHECK(max_diff(pure_qubit_state(QubitPrep(0.0, 1.3)).matrix(), up) < 1e-15);
  Complex2x2 down = Complex2x2::Zero();
  down(1, 1) = 1;
  CHECK(max_diff(pure_qubit_state(QubitPrep(kPi, 0.0)).matrix(), down) < 1e-15);
  CHECK(max_diff(pure_qubit_state(QubitPrep(kPi / 2, 0.0)).matrix(), Complex2x2::Constant(0.5)) < 1e-15);
}

TEST_CASE("probe_state_transverse examples") {
  const QubitPrep prep(0.9, 2.1);
  CHECK(max_diff(probe_state_transverse(InverseTemperature(1.3), prep, ProtocolTime(0.0)).matrix(),
                 pure_qubit_state(prep).matrix()) < 1e-15);
  for (double beta : {0.2, 3.0}) {
    for (double tau : {0.4, 2.5}) {
      const auto rho = probe_state_transverse(InverseTemperature(beta), QubitPrep(kPi / 2, 0.0), ProtocolTime(tau));
      CHECK(max_diff(rho.matrix(), Complex2x2::Constant(0.5)) < 1e-15);
    }
  }
  // frozen: mpmath (1 + exp(-coth(1)/4))/2
  const auto rho = probe_state_transverse(InverseTemperature(2.0), QubitPrep(0.0, 0.0), ProtocolTime(0.5));
  CHECK(rho(0, 0).real() == doctest::Approx(0.860088299242050772).epsilon(1e-15));
}

TEST_CASE("probe_state_transverse matches the explicit matrix elements") {
  const double beta = 1.7, theta = 1.1, phi = 0.8, tau = 0.6;
  const double zeta = 1 / std::tanh(beta / 2) * tau * tau;
  const auto rho = probe_state_transverse(InverseTemperature(beta), QubitPrep(theta, phi), ProtocolTime(tau));
  CHECK(rho(0, 0).real() == doctest::Approx((1 + std::cos(theta) * std::exp(-zeta)) / 2).epsilon(1e-14));
  CHECK(rho(1, 1).real() == doctest::Approx((1 - std::cos(theta) * std::exp(-zeta)) / 2).epsilon(1e-14));
  CHECK(rho(0, 1).real() == doctest::Approx(std::sin(theta) * std::cos(phi) / 2).epsilon(1e-14));
  CHECK(rho(0, 1).imag() == doctest::Approx(-std::sin(theta) * std::sin(phi) * std::exp(-zeta) / 2).epsilon(1e-14));
  CHECK(std::abs(rho(1, 0) - std::conj(rho(0, 1))) == 0.0);
}

TEST_CASE("probe_state_transverse_displaced") {
  const InverseTemperature beta(2.0);
  const QubitPrep prep(0.7, 1.9);
  const ProtocolTime tau(0.5);
  CHECK(max_diff(probe_state_transverse_displaced(beta, prep, tau, 0.0).matrix(),
                 probe_state_transverse(beta, prep, tau).matrix()) < 1e-15);
  for (double alpha : {0.3, -1.0, 2.5}) {
    CHECK(max_diff(probe_state_transverse_displaced(beta, QubitPrep(kPi / 2, 0.0), tau, alpha).matrix(),
                   Complex2x2::Constant(0.5)) < 1e-15);
  }
  // U = exp(-i chi/2 sigma_x) with chi = 2 sqrt(2) alpha tau acting on the undisplaced state
  const double alpha = 0.8;
  const double chi = 2 * std::sqrt(2.0) * alpha * 0.5;
  Complex2x2 u;
  u << std::cos(chi / 2), std::complex<double>(0, -std::sin(chi / 2)), std::complex<double>(0, -std::sin(chi / 2)),
      std::cos(chi / 2);
  const Complex2x2 expected = u * probe_state_transverse(beta, prep, tau).matrix() * u.adjoint();
  CHECK(max_diff(probe_state_transverse_displaced(beta, prep, tau, alpha).matrix(), expected) < 1e-15);
  CHECK_THROWS_AS(probe_state_transverse_displaced(beta, prep, tau, std::complex<double>(0.1, 0.2)), DomainError);
  CHECK_NOTHROW(probe_state_transverse_displaced(beta, prep, tau, std::complex<double>(0.1, 0.0)));
}

TEST_CASE("probe_state_dispersive examples") {
  const QubitPrep prep(1.2, 4.0);
  CHECK(max_diff(probe_state_dispersive(InverseTemperature(0.8), prep, ProtocolTime(0.0)).matrix(),
                 pure_qubit_state(prep).matrix()) < 1e-15);
  for (double beta : {0.3, 7.0}) {
    const auto rho = probe_state_dispersive(InverseTemperature(beta), QubitPrep(kPi / 2, 0.0), ProtocolTime(1.3));
    CHECK(max_diff(rho.matrix(), Complex2x2::Constant(0.5)) < 1e-15);
  }
  const auto rho = probe_state_dispersive(InverseTemperature(1.0), QubitPrep(0.0, 0.0), ProtocolTime(0.7));
  const double c = thermal_phase_sum(1.0, 1.4).real();
  CHECK(rho(0, 0).real() == doctest::Approx(0.5 + c / 2).epsilon(1e-15));
  // frozen: mpmath Fock sum
  CHECK(rho(0, 0).real() == doctest::Approx(0.793282768065278844).epsilon(1e-15));
}

TEST_CASE("probe_state_dispersive equals the Gamma form") {
  const double beta = 1.4, theta = 0.9, phi = 2.2, tau = 0.8;
  const double gamma = (1 - std::exp(-beta)) / (4 * (std::cos(2 * tau) - std::cosh(beta)));
  const double zeta = 1 / std::tanh(beta / 2) * tau * tau;
  const double sinc2 = std::pow(std::sin(tau) / tau, 2);
  const double rho00 = std::pow(std::cos(theta / 2), 2) +
                       gamma * (2 * zeta * std::cos(theta) * sinc2 - std::sin(theta) * std::sin(phi) * std::sin(2 * tau));
  const std::complex<double> rho01(
      std::sin(theta) * std::cos(phi) / 2,
      gamma * ((std::exp(beta) - std::cos(2 * tau)) * std::sin(theta) * std::sin(phi) - std::cos(theta) * std::sin(2 * tau)));
  const auto rho = probe_state_dispersive(InverseTemperature(beta), QubitPrep(theta, phi), ProtocolTime(tau));
  CHECK(rho(0, 0).real() == doctest::Approx(rho00).epsilon(1e-14));
  CHECK(std::abs(rho(0, 1) - rho01) < 1e-14);
}

TEST_CASE("probe_state_dispersive survives large beta") {
  const auto rho = probe_state_dispersive(InverseTemperature(800.0), QubitPrep(1.0, 1.0), ProtocolTime(0.4));
  CHECK(rho.matrix().allFinite());
  CHECK(max_diff(rho.matrix(), pure_qubit_state(QubitPrep(1.0, 1.0)).matrix()) < 1e-15);
}

TEST_CASE("dispersive_kernel") {
  const auto k0 = dispersive_kernel(InverseTemperature(2.0), ProtocolTime(0.0));
  CHECK(k0.cosine_sum == doctest::Approx(1.0));
  CHECK(k0.sine_sum == 0.0);
  const auto cold = dispersive_kernel(InverseTemperature(60.0), ProtocolTime(0.9));
  CHECK(std::abs(cold.gamma_factor) < 1e-25);
  CHECK(cold.cosine_sum == doctest::Approx(1.0));
  const auto k = dispersive_kernel(InverseTemperature(1.0), ProtocolTime(0.7));
  CHECK(k.gamma_factor == doctest::Approx((1 - std::exp(-1.0)) / (4 * (std::cos(1.4) - std::cosh(1.0)))).epsilon(1e-14));
  // frozen: mpmath
  CHECK(k.gamma_factor == doctest::Approx(-0.115088913361956581).epsilon(1e-14));
  CHECK(k.sine_sum == doctest::Approx(-2 * k.gamma_factor * std::sin(1.4)).epsilon(1e-13));
  CHECK(k.cosine_sum * k.cosine_sum + k.sine_sum * k.sine_sum <= 1.0);
}

TEST_CASE("probe_jet agrees with the matrix generators") {
  for (ModelId model : {ModelId::Transverse, ModelId::Dispersive}) {
    const InverseTemperature beta(1.6);
    const QubitPrep prep(0.6, 5.0);
    const ProtocolTime tau(1.1);
    const auto jet = probe_jet<Real>(model, beta, prep, tau);
    const auto rho = probe_state<Real>(model, beta, prep, tau);
    CHECK(static_cast<double>((jet.rho - rho.matrix()).cwiseAbs().maxCoeff()) < 1e-17);
    CHECK(std::abs(static_cast<double>(jet.drho.trace().real())) < 1e-18);
  }
}
