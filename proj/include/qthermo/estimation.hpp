#pragma once

#include <optional>
#include <vector>

#include "qthermo/models.hpp"
#include "qthermo/qmath.hpp"

namespace qthermo {

/// Qubit POVM: Hermitian PSD effects summing to the identity (at most 8 outcomes).
class Povm2 {
 public:
  explicit Povm2(std::vector<Complex2x2> effects);
  /// {|0><0|, |1><1|}
  static Povm2 population();

  const std::vector<Complex2x2>& effects() const { return effects_; }
  std::size_t size() const { return effects_.size(); }
  bool is_population() const;

 private:
  std::vector<Complex2x2> effects_;
};

struct Sld {
  Complex2x2 matrix;
  /// Set when rho had a (numerically) zero eigenvalue; the kernel block of L is then zero.
  bool rank_deficient = false;
};

/// L = identity 1 + x sigma_x + y sigma_y + z sigma_z.
struct PauliCoefficients {
  double identity = 0, x = 0, y = 0, z = 0;
};

/**
 * SLD components in the frame adapted to the probe state: n = r/|r| (longitudinal),
 * e = x_hat cross n normalized (transverse), n cross e (axial). At theta = 0 the axial
 * component vanishes for both models.
 */
struct SldEigenframe {
  double identity = 0, longitudinal = 0, transverse = 0, axial = 0;
};

struct EstimationReport {
  double fisher_population = 0;
  double qfi = 0;
  Complex2x2 sld = Complex2x2::Zero();
  std::optional<double> tau_opt;
  QubitPrep prep_used{0.0, 0.0};
};

struct ProtocolOptimum {
  /// Report at the population-FI optimum; tau_opt holds the optimal time.
  EstimationReport fisher;
  QubitPrep qfi_prep{0.0, 0.0};
  double qfi_tau = 0;
  double qfi_value = 0;
};

std::vector<double> outcome_probabilities(const DensityMatrix2<double>& state, const Povm2& povm);

/// Classical FI sum_j (d p_j)^2 / p_j of a state family given its exact beta-derivative.
/// Probabilities and derivatives below 64 long-double epsilons count as zero; returns +infinity
/// when some p_j is zero while its derivative is not.
double fisher_information(const StateJet<Real>& jet, const Povm2& povm);

double fisher_information(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time,
                          const Povm2& povm = Povm2::population());

/// Closed form cos^2 theta csch^4(beta/2) tau^4 / (4 (e^{2 zeta} - cos^2 theta)).
double fisher_population_transverse_closed_form(InverseTemperature beta, const QubitPrep& prep, ProtocolTime time);

/// QFI from the eigen-decomposition of rho (spectral term + gamma-weighted eigenvector term).
double qfi_eigen(const StateJet<Real>& jet);
/// QFI in Bloch form |dr|^2 + (r.dr)^2 / (1 - |r|^2).
double qfi_bloch(const StateJet<Real>& jet);

/// qfi_eigen after checking it against qfi_bloch to 1e-8 relative; throws InternalConsistencyError.
double qfi(const StateJet<Real>& jet);
double qfi(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time);

/// H_opt(beta) = sin^2 tau [2 cos 2tau - 2 cosh beta - sinh^2 beta] / (2 [cos 2tau - cosh beta]^3), factored in e^{-beta}.
double qfi_dispersive_closed_form(InverseTemperature beta, ProtocolTime time);
/// F_opt of the dispersive model at theta in {0, pi}, factored in e^{-beta}.
double fisher_dispersive_closed_form(InverseTemperature beta, ProtocolTime time);

Sld sld(const StateJet<Real>& jet);
Sld sld(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time);

PauliCoefficients pauli_coefficients(const Complex2x2& op);
SldEigenframe sld_eigenframe(const StateJet<Real>& jet);

/// argmax_tau of the theta = 0 transverse population FI: sqrt([1 + W(-2/e^2)/2] tanh(beta/2)).
ProtocolTime tau_opt_transverse(InverseTemperature beta);

/// zeta at the optimum, 1 + W(-2/e^2)/2, independent of beta.
double optimal_zeta_transverse();

/// argmax over tau in [0, tau_max] of the population FI at a fixed preparation (257-point scan, golden refinement).
ProtocolTime tau_opt_numeric(ModelId model, InverseTemperature beta, const QubitPrep& prep, double tau_max);

EstimationReport estimation_report(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time);

/// Lattice search over (theta, phi, tau) followed by coordinate-wise golden-section refinement.
ProtocolOptimum optimize_protocol(ModelId model, InverseTemperature beta, double tau_max);

/// [H - F] / H at theta = 0 with the population POVM. Throws DomainError where H vanishes.
double fi_deficit(ModelId model, InverseTemperature beta, ProtocolTime time);

}  // namespace qthermo
