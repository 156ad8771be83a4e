#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "qthermo/qmath.hpp"

namespace qthermo {

/// beta = Omega / (k_B T), dimensionless. Positive and finite.
class InverseTemperature {
 public:
  explicit InverseTemperature(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw DomainError("InverseTemperature: beta must be positive and finite");
    }
  }
  double value() const { return beta_; }
  /// Mean thermal occupation 1/(e^beta - 1).
  double mean_occupation() const { return 1.0 / std::expm1(beta_); }

 private:
  double beta_;
};

/// Bloch angles of the pure probe preparation cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
class QubitPrep {
 public:
  QubitPrep(double theta, double phi) : theta_(theta), phi_(phi) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi) || !(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
      throw DomainError("QubitPrep: need theta in [0, pi] and phi in [0, 2pi)");
    }
  }
  /// Reduces any finite (theta, phi) to the canonical ranges describing the same ray.
  static QubitPrep wrapped(double theta, double phi);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  double theta_;
  double phi_;
};

inline QubitPrep QubitPrep::wrapped(double theta, double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta, two_pi);
  if (theta < 0.0) {
    theta += two_pi;
  }
  if (theta > std::numbers::pi) {
    theta = two_pi - theta;
    phi += std::numbers::pi;
  }
  phi = std::fmod(phi, two_pi);
  if (phi < 0.0) {
    phi += two_pi;
  }
  if (phi >= two_pi) {
    phi = 0.0;
  }
  return QubitPrep(theta, phi);
}

/// tau = g t, dimensionless interaction time.
class ProtocolTime {
 public:
  explicit ProtocolTime(double tau) : tau_(tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
      throw DomainError("ProtocolTime: tau must be non-negative and finite");
    }
  }
  double value() const { return tau_; }

 private:
  double tau_;
};

enum class ModelId { Transverse, Dispersive };

inline std::string_view to_string(ModelId model) {
  return model == ModelId::Transverse ? "transverse" : "dispersive";
}

inline ModelId parse_model(std::string_view name) {
  if (name == "transverse") {
    return ModelId::Transverse;
  }
  if (name == "dispersive") {
    return ModelId::Dispersive;
  }
  throw DomainError("unknown model '" + std::string(name) + "'");
}

/// Qubit density matrix; Hermitian, unit trace and positive semidefinite to 1e-12.
template <typename Scalar = double>
class DensityMatrix2 {
 public:
  explicit DensityMatrix2(const Matrix2c<Scalar>& m) : m_(m) {
    using std::abs;
    const Scalar tol(1e-12);
    if (!m.allFinite()) {
      throw DomainError("DensityMatrix2: non-finite entries");
    }
    if (!is_hermitian(m, tol)) {
      throw DomainError("DensityMatrix2: not Hermitian");
    }
    if (abs(m.trace() - std::complex<Scalar>(1)) > tol) {
      throw DomainError("DensityMatrix2: trace differs from one");
    }
    const auto eig = eig_hermitian_2x2<Scalar>(m);
    if (eig.values(1) < -tol) {
      throw DomainError("DensityMatrix2: negative eigenvalue");
    }
  }

  const Matrix2c<Scalar>& matrix() const { return m_; }
  std::complex<Scalar> operator()(int row, int col) const { return m_(row, col); }
  Vector3<Scalar> bloch() const { return bloch_vector<Scalar>(m_); }
  Scalar purity() const { return (m_ * m_).trace().real(); }

  template <typename Other>
  DensityMatrix2<Other> cast() const {
    return DensityMatrix2<Other>(m_.template cast<std::complex<Other>>());
  }

 private:
  Matrix2c<Scalar> m_;
};

/// A probe state together with its exact derivative with respect to beta.
template <typename Scalar>
struct StateJet {
  Matrix2c<Scalar> rho;
  Matrix2c<Scalar> drho;
};

/// Gamma and the thermal trigonometric sums C = sum p_n cos 2n tau, S = sum p_n sin 2n tau.
template <typename Scalar = double>
struct DispersiveKernel {
  Scalar gamma_factor;
  Scalar cosine_sum;
  Scalar sine_sum;
};

namespace detail {

template <typename Scalar>
Vector3<Scalar> prep_bloch(const QubitPrep& prep) {
  using std::cos;
  using std::sin;
  const Scalar th(prep.theta());
  const Scalar ph(prep.phi());
  return Vector3<Scalar>(sin(th) * cos(ph), sin(th) * sin(ph), cos(th));
}

/// Rotation of (y, z) generated by exp(-i chi/2 sigma_x).
template <typename Scalar>
Vector3<Scalar> rotate_x(const Vector3<Scalar>& v, Scalar chi) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(chi);
  const Scalar s = sin(chi);
  return Vector3<Scalar>(v(0), v(1) * c - v(2) * s, v(1) * s + v(2) * c);
}

/// Bloch vector and d/dbeta of the transverse probe, zeta = zeta_scale * coth(beta/2) tau^2.
template <typename Scalar>
void transverse_bloch(Scalar beta, const QubitPrep& prep, Scalar tau, Scalar zeta_scale, Vector3<Scalar>& r,
                      Vector3<Scalar>& dr) {
  using std::exp;
  using std::expm1;
  const Scalar zeta = zeta_scale * coth(beta / Scalar(2)) * tau * tau;
  // d zeta / d beta = -tau^2 csch^2(beta/2) / 2 = -2 tau^2 q / (1-q)^2
  const Scalar q = exp(-beta);
  const Scalar one_minus_q = -expm1(-beta);
  const Scalar dzeta = zeta_scale * Scalar(-2) * tau * tau * q / (one_minus_q * one_minus_q);
  const Scalar decay = exp(-zeta);
  const Vector3<Scalar> r0 = prep_bloch<Scalar>(prep);
  r = Vector3<Scalar>(r0(0), r0(1) * decay, r0(2) * decay);
  dr = Vector3<Scalar>(Scalar(0), -r0(1) * decay * dzeta, -r0(2) * decay * dzeta);
}

/// Bloch vector and d/dbeta of the dispersive probe, via z = C + iS = (1-q)/(1 - q e^{2i tau}).
template <typename Scalar>
void dispersive_bloch(Scalar beta, const QubitPrep& prep, Scalar tau, Vector3<Scalar>& r, Vector3<Scalar>& dr) {
  using std::exp;
  using std::expm1;
  using Cx = std::complex<Scalar>;
  const Scalar q = exp(-beta);
  const Scalar one_minus_q = -expm1(-beta);
  const Cx w = std::polar(Scalar(1), Scalar(2) * tau);
  const Cx denom = Scalar(1) - q * w;
  const Cx z = one_minus_q / denom;
  // dz/dbeta = -q dz/dq,  dz/dq = (w - 1) / (1 - q w)^2
  const Cx dz = -q * (w - Scalar(1)) / (denom * denom);
  const Vector3<Scalar> r0 = prep_bloch<Scalar>(prep);
  const Scalar c = z.real(), s = z.imag(), dc = dz.real(), ds = dz.imag();
  r = Vector3<Scalar>(r0(0), r0(1) * c - r0(2) * s, r0(1) * s + r0(2) * c);
  dr = Vector3<Scalar>(Scalar(0), r0(1) * dc - r0(2) * ds, r0(1) * ds + r0(2) * dc);
}

}  // namespace detail

template <typename Scalar = double>
DensityMatrix2<Scalar> pure_qubit_state(const QubitPrep& prep) {
  using std::cos;
  using std::sin;
  Vector2c<Scalar> psi;
  psi << std::complex<Scalar>(cos(Scalar(prep.theta()) / Scalar(2))),
      std::polar(sin(Scalar(prep.theta()) / Scalar(2)), Scalar(prep.phi()));
  return DensityMatrix2<Scalar>(psi * psi.adjoint());
}

/**
 * Transverse (g X sigma_x) probe state:
 *   rho_00 = (1 + cos(theta) e^{-zeta}) / 2
 *   rho_01 = sin(theta) (cos(phi) - i sin(phi) e^{-zeta}) / 2,   zeta = coth(beta/2) tau^2.
 */
template <typename Scalar = double>
DensityMatrix2<Scalar> probe_state_transverse(InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  using std::cos;
  using std::exp;
  using std::sin;
  using Cx = std::complex<Scalar>;
  const Scalar tau(time.value());
  const Scalar zeta = coth(Scalar(beta.value()) / Scalar(2)) * tau * tau;
  const Scalar decay = exp(-zeta);
  const Scalar th(prep.theta());
  const Scalar ph(prep.phi());
  Matrix2c<Scalar> m;
  m(0, 0) = Cx((Scalar(1) + cos(th) * decay) / Scalar(2));
  m(1, 1) = Cx((Scalar(1) - cos(th) * decay) / Scalar(2));
  m(0, 1) = Cx(sin(th) * cos(ph), -sin(th) * sin(ph) * decay) / Scalar(2);
  m(1, 0) = std::conj(m(0, 1));
  return DensityMatrix2<Scalar>(m);
}

/// Transverse probe for a displaced thermal oscillator D(alpha) rho D(alpha)^dag, alpha real:
/// U rho U^dag with U = exp(-i sqrt(2) alpha tau sigma_x).
template <typename Scalar = double>
DensityMatrix2<Scalar> probe_state_transverse_displaced(InverseTemperature beta, const QubitPrep& prep,
                                                        ProtocolTime time, double alpha) {
  Vector3<Scalar> r, dr;
  detail::transverse_bloch<Scalar>(Scalar(beta.value()), prep, Scalar(time.value()), Scalar(1), r, dr);
  const Scalar chi = Scalar(2) * std::numbers::sqrt2_v<Scalar> * Scalar(alpha) * Scalar(time.value());
  return DensityMatrix2<Scalar>(from_bloch<Scalar>(detail::rotate_x<Scalar>(r, chi)));
}

/// Only real displacements are supported; a non-zero imaginary part is rejected.
template <typename Scalar = double>
DensityMatrix2<Scalar> probe_state_transverse_displaced(InverseTemperature beta, const QubitPrep& prep,
                                                        ProtocolTime time, std::complex<double> alpha) {
  if (alpha.imag() != 0.0) {
    throw DomainError("probe_state_transverse_displaced: complex displacement is not supported");
  }
  return probe_state_transverse_displaced<Scalar>(beta, prep, time, alpha.real());
}

template <typename Scalar = double>
DispersiveKernel<Scalar> dispersive_kernel(InverseTemperature beta, ProtocolTime time) {
  using std::cos;
  using std::exp;
  using std::expm1;
  const Scalar b(beta.value());
  const Scalar tau(time.value());
  const Scalar q = exp(-b);
  const Scalar one_minus_q = -expm1(-b);
  const Scalar c2 = cos(Scalar(2) * tau);
  // 1 - 2q cos 2tau + q^2 = 2q (cosh beta - cos 2tau), never zero for beta > 0
  const Scalar d = (one_minus_q * one_minus_q) + Scalar(2) * q * (Scalar(1) - c2);
  const auto sums = thermal_phase_sum<Scalar>(b, Scalar(2) * tau);
  return {-q * one_minus_q / (Scalar(2) * d), sums.real(), sums.imag()};
}

/**
 * Dispersive (g a^dag a sigma_x) probe state:
 *   rho_00 = cos^2(theta/2) + Gamma [2 zeta cos(theta) sinc^2 tau - sin(theta) sin(phi) sin 2tau]
 *   rho_01 = sin(theta) cos(phi)/2 + i Gamma {[e^beta - cos 2tau] sin(theta) sin(phi) - cos(theta) sin 2tau}
 * with Gamma = (1 - e^{-beta}) / (4 [cos 2tau - cosh beta]). Each Gamma product is evaluated in
 * its e^{-beta}-factored form so nothing overflows at large beta.
 */
template <typename Scalar = double>
DensityMatrix2<Scalar> probe_state_dispersive(InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  using std::cos;
  using std::exp;
  using std::expm1;
  using std::sin;
  using Cx = std::complex<Scalar>;
  const Scalar b(beta.value());
  const Scalar tau(time.value());
  const Scalar th(prep.theta());
  const Scalar ph(prep.phi());
  const Scalar q = exp(-b);
  const Scalar one_minus_q = -expm1(-b);
  const Scalar c2 = cos(Scalar(2) * tau);
  const Scalar s2 = sin(Scalar(2) * tau);
  const Scalar sin_tau = sin(tau);
  const Scalar d = (one_minus_q * one_minus_q) + Scalar(2) * q * (Scalar(1) - c2);

  const Scalar gamma = -q * one_minus_q / (Scalar(2) * d);
  // Gamma * 2 zeta sinc^2 tau, with zeta sinc^2 tau = coth(beta/2) sin^2 tau
  const Scalar gamma_zeta = -q * (Scalar(1) + q) * sin_tau * sin_tau / d;
  // Gamma * (e^beta - cos 2tau)
  const Scalar gamma_eb = -one_minus_q * (Scalar(1) - q * c2) / (Scalar(2) * d);

  const Scalar half_cos = cos(th / Scalar(2));
  const Scalar rho00 = half_cos * half_cos + cos(th) * gamma_zeta - sin(th) * sin(ph) * s2 * gamma;
  const Cx rho01 = Cx(sin(th) * cos(ph) / Scalar(2), sin(th) * sin(ph) * gamma_eb - cos(th) * s2 * gamma);

  Matrix2c<Scalar> m;
  m(0, 0) = Cx(rho00);
  m(1, 1) = Cx(Scalar(1) - rho00);
  m(0, 1) = rho01;
  m(1, 0) = std::conj(rho01);
  return DensityMatrix2<Scalar>(m);
}

template <typename Scalar = double>
DensityMatrix2<Scalar> probe_state(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  return model == ModelId::Transverse ? probe_state_transverse<Scalar>(beta, prep, time)
                                      : probe_state_dispersive<Scalar>(beta, prep, time);
}

/// Probe state and its analytic beta-derivative.
template <typename Scalar = Real>
StateJet<Scalar> probe_jet(ModelId model, InverseTemperature beta, const QubitPrep& prep, ProtocolTime time) {
  Vector3<Scalar> r, dr;
  if (model == ModelId::Transverse) {
    detail::transverse_bloch<Scalar>(Scalar(beta.value()), prep, Scalar(time.value()), Scalar(1), r, dr);
  } else {
    detail::dispersive_bloch<Scalar>(Scalar(beta.value()), prep, Scalar(time.value()), r, dr);
  }
  return {from_bloch<Scalar>(r), from_bloch<Scalar>(dr, Scalar(0))};
}

template <typename Scalar = Real>
StateJet<Scalar> probe_jet_displaced(InverseTemperature beta, const QubitPrep& prep, ProtocolTime time,
                                     double alpha) {
  Vector3<Scalar> r, dr;
  detail::transverse_bloch<Scalar>(Scalar(beta.value()), prep, Scalar(time.value()), Scalar(1), r, dr);
  const Scalar chi = Scalar(2) * std::numbers::sqrt2_v<Scalar> * Scalar(alpha) * Scalar(time.value());
  return {from_bloch<Scalar>(detail::rotate_x<Scalar>(r, chi)),
          from_bloch<Scalar>(detail::rotate_x<Scalar>(dr, chi), Scalar(0))};
}

}  // namespace qthermo
