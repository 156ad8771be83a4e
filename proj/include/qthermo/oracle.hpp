#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "qthermo/models.hpp"
#include "qthermo/qmath.hpp"

// Brute-force reference computations. Nothing here calls the closed-form
// generators except the finite-difference QFI/FI routines, which difference
// whatever state generator they are handed.
namespace qthermo::oracle {

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock levels 0..dim-1; tail_bound = sum_{n >= dim} p_n = e^{-beta dim}.
struct FockTruncation {
  int dim = 0;
  double tail_bound = 1.0;

  FockTruncation(int dimension, InverseTemperature beta);
  /// dim = ceil(ln(1/epsilon)/beta) + 10.
  static FockTruncation for_tail(InverseTemperature beta, double epsilon);
};

/// Detuned Jaynes-Cummings parameters: coupling lambda, detuning Delta = Omega - omega, time t.
struct FullJcParams {
  double lambda_coupling;
  double delta;
  double time;

  FullJcParams(double lambda, double detuning, double t);
  /// Delta^2/4 > 100 lambda^2 (nbar + 1).
  bool dispersive_regime(InverseTemperature beta) const;
};

using StateFunction = std::function<Matrix2c<Real>(Real beta)>;

/// Thermal X-quadrature average of exp(-i tau x sigma_x) |psi><psi| exp(i tau x sigma_x); x is Gaussian
/// with variance nbar + 1/2 and mean sqrt(2) alpha.
DensityMatrix2<Real> probe_state_transverse_quadrature(InverseTemperature beta, const QubitPrep& prep,
                                                       ProtocolTime time, double alpha,
                                                       const QuadratureRule<Real>& rule);
DensityMatrix2<Real> probe_state_transverse_quadrature(InverseTemperature beta, const QubitPrep& prep,
                                                       ProtocolTime time, double alpha, int order);

/// sum_{n < dim} p_n exp(-i tau n sigma_x) |psi><psi| exp(i tau n sigma_x), renormalized by the retained weight.
DensityMatrix2<Real> probe_state_dispersive_focksum(InverseTemperature beta, const QubitPrep& prep,
                                                    ProtocolTime time, const FockTruncation& trunc);

/**
 * Reduced qubit state after exact detuned Jaynes-Cummings evolution of |psi><psi| (x) rho_thermal.
 *
 * Each manifold {|1,n>, |0,n+1>} evolves by its own 2x2 exponential with Rabi frequency
 * Omega_{n+1} = sqrt(Delta^2/4 + lambda^2 (n+1)); |0,0> only picks up a phase. The evolution runs
 * in the interaction frame of Omega (a^dag a + |1><1|), which is exact since that operator
 * commutes with the Hamiltonian. The preparation is given in the frame of the a^dag a sigma_x
 * model and mapped through a Hadamard (the JC dephasing acts in the sigma_z basis); the result
 * is mapped back.
 *
 * Throws TruncationError when the top two retained levels carry more than 1e-10 thermal weight.
 */
DensityMatrix2<Real> full_jc_probe_state(InverseTemperature beta, const QubitPrep& prep, const FullJcParams& params,
                                         const FockTruncation& trunc);

/// Eigen-decomposition QFI with d rho from a five-point difference of `state`.
double qfi_numeric(const StateFunction& state, InverseTemperature beta, double h);
double qfi_numeric(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time, double h);

/// (d p0)^2 / (p0 (1 - p0)) with d p0 from a five-point difference of `state`.
double fisher_population_numeric(const StateFunction& state, InverseTemperature beta, double h);
double fisher_population_numeric(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time,
                                 double h);

/// Default step 1e-3 max(1, beta), capped at beta/4 so the stencil stays at positive beta.
/// The states are long double, so roundoff rather than truncation sets the useful step.
double default_step(InverseTemperature beta);

struct DispersiveLimitPoint {
  double delta;
  double qfi_jc_lambda2_over_delta;      // t = tau Delta / lambda^2
  double qfi_jc_two_lambda2_over_delta;  // t = tau Delta / (2 lambda^2)
  double gap_lambda2_over_delta;         // relative to the dispersive closed form
  double gap_two_lambda2_over_delta;
};

struct DispersiveLimitScan {
  double qfi_dispersive;
  std::vector<DispersiveLimitPoint> points;
  /// 1 for g_eff = lambda^2/Delta, 2 for 2 lambda^2/Delta: the candidate with the smaller gap at the largest Delta.
  int winning_multiplier;
};

/// Full JC vs dispersive QFI at fixed g_eff t = tau for each detuning in `detunings`.
DispersiveLimitScan dispersive_limit_scan(InverseTemperature beta, const QubitPrep& prep, ProtocolTime tau,
                                          double lambda, const std::vector<double>& detunings);

}  // namespace qthermo::oracle
