#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace qthermo {

/// Working precision for derivative-sensitive paths (QFI, SLD, finite differences).
using Real = long double;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using Vector2c = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Complex2x2 = Matrix2c<double>;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace pauli {

template <typename Scalar = double>
Matrix2c<Scalar> identity() {
  return Matrix2c<Scalar>::Identity();
}

template <typename Scalar = double>
Matrix2c<Scalar> x() {
  Matrix2c<Scalar> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> y() {
  using C = std::complex<Scalar>;
  Matrix2c<Scalar> m;
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> z() {
  Matrix2c<Scalar> m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

// ---------------------------------------------------------------------------
// Hyperbolic and trigonometric helpers with small/large argument guards.

/// coth(x) evaluated as 1 + 2/(e^{2x} - 1) so that large x does not cancel.
template <typename Scalar>
Scalar coth(Scalar x) {
  using std::expm1;
  return Scalar(1) + Scalar(2) / expm1(Scalar(2) * x);
}

template <typename Scalar>
Scalar csch(Scalar x) {
  using std::exp;
  using std::expm1;
  // 2 e^{-x} / (1 - e^{-2x})
  return Scalar(2) * exp(-x) / (-expm1(Scalar(-2) * x));
}

template <typename Scalar>
Scalar sinc(Scalar x) {
  using std::abs;
  using std::sin;
  if (abs(x) < Scalar(1e-4)) {
    const Scalar x2 = x * x;
    return Scalar(1) - x2 / Scalar(6) + x2 * x2 / Scalar(120);
  }
  return sin(x) / x;
}

// ---------------------------------------------------------------------------
// Lambert W, principal branch.

/**
 * Principal branch W0 of the Lambert function, the inverse of w -> w e^w on
 * [-1/e, inf).
 *
 * Halley iteration from a branch-point series (x near -1/e), log1p (moderate
 * x) or the asymptotic log expansion (large x). Iterates until the Halley step
 * is below a few ulps of w; the residual |w e^w - x| then sits well below
 * 1e-13 max(1, |x|).
 */
template <typename Scalar = double>
Scalar lambert_w0(Scalar x) {
  using std::abs;
  using std::exp;
  using std::isfinite;
  using std::log;
  using std::log1p;
  using std::sqrt;

  if (std::isnan(x)) {
    throw DomainError("lambert_w0: NaN argument");
  }
  const Scalar e = std::numbers::e_v<Scalar>;
  const Scalar branch = -Scalar(1) / e;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  if (x < branch) {
    if (x >= branch - Scalar(4) * eps) {
      return Scalar(-1);
    }
    throw DomainError("lambert_w0: argument below -1/e (" + std::to_string(static_cast<double>(x)) + ")");
  }
  if (x == Scalar(0)) {
    return Scalar(0);
  }
  if (!isfinite(x)) {
    return x;
  }

  Scalar w;
  if (x < Scalar(-0.25)) {
    const Scalar p = sqrt(Scalar(2) * (e * x + Scalar(1)));
    w = Scalar(-1) + p - p * p / Scalar(3) + Scalar(11) / Scalar(72) * p * p * p;
  } else if (x < Scalar(3)) {
    w = log1p(x) * (Scalar(1) - log1p(log1p(x)) / (Scalar(2) + log1p(x)));
  } else {
    const Scalar l1 = log(x);
    const Scalar l2 = log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int iter = 0; iter < 64; ++iter) {
    const Scalar ew = exp(w);
    const Scalar f = w * ew - x;
    const Scalar wp1 = w + Scalar(1);
    if (wp1 == Scalar(0)) {
      break;
    }
    const Scalar denom = ew * wp1 - (w + Scalar(2)) * f / (Scalar(2) * wp1);
    if (denom == Scalar(0)) {
      break;
    }
    const Scalar step = f / denom;
    w -= step;
    if (abs(step) <= Scalar(4) * eps * (Scalar(1) + abs(w))) {
      break;
    }
  }
  return w < Scalar(-1) ? Scalar(-1) : w;
}

// ---------------------------------------------------------------------------
// Hermitian 2x2 eigen-decomposition.

template <typename Scalar>
struct HermitianEigen2 {
  /// Descending order.
  Eigen::Matrix<Scalar, 2, 1> values;
  /// Column k is the unit eigenvector for values(k).
  Matrix2c<Scalar> vectors;
};

template <typename Scalar>
bool is_hermitian(const Matrix2c<Scalar>& m, Scalar tol) {
  using std::abs;
  return abs(m(0, 0).imag()) <= tol && abs(m(1, 1).imag()) <= tol &&
         abs(m(0, 1) - std::conj(m(1, 0))) <= tol;
}

/// Closed-form eigen-decomposition of a Hermitian 2x2 matrix.
template <typename Scalar>
HermitianEigen2<Scalar> eig_hermitian_2x2(const Matrix2c<Scalar>& m) {
  using std::abs;
  using std::hypot;
  using C = std::complex<Scalar>;

  const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
  if (!is_hermitian(m, Scalar(1e-12) * scale)) {
    throw DomainError("eig_hermitian_2x2: matrix is not Hermitian");
  }
  const Scalar a = m(0, 0).real();
  const Scalar d = m(1, 1).real();
  const C b = (m(0, 1) + std::conj(m(1, 0))) / Scalar(2);

  const Scalar mean = (a + d) / Scalar(2);
  const Scalar half_diff = (a - d) / Scalar(2);
  const Scalar radius = hypot(half_diff, abs(b));

  HermitianEigen2<Scalar> out;
  out.values << mean + radius, mean - radius;

  if (radius == Scalar(0)) {
    out.vectors = Matrix2c<Scalar>::Identity();
    return out;
  }
  Vector2c<Scalar> top;
  if (half_diff >= Scalar(0)) {
    top << C(radius + half_diff), std::conj(b);
  } else {
    top << b, C(radius - half_diff);
  }
  top /= top.norm();
  out.vectors.col(0) = top;
  out.vectors(0, 1) = -std::conj(top(1));
  out.vectors(1, 1) = std::conj(top(0));
  return out;
}

/// Half the trace norm of a - b.
template <typename Scalar>
Scalar trace_distance(const Matrix2c<Scalar>& a, const Matrix2c<Scalar>& b) {
  const Matrix2c<Scalar> diff = a - b;
  const Matrix2c<Scalar> herm = (diff + diff.adjoint()) / Scalar(2);
  const auto eig = eig_hermitian_2x2<Scalar>(herm);
  return (std::abs(eig.values(0)) + std::abs(eig.values(1))) / Scalar(2);
}

/// Bloch vector r with m = (1 + r.sigma)/2 for unit-trace Hermitian m.
template <typename Scalar>
Vector3<Scalar> bloch_vector(const Matrix2c<Scalar>& m) {
  return Vector3<Scalar>(Scalar(2) * m(0, 1).real(), Scalar(-2) * m(0, 1).imag(),
                         (m(0, 0) - m(1, 1)).real());
}

/// (c 1 + v.sigma)/2 ; c = 1 gives a state, c = 0 a traceless tangent.
template <typename Scalar>
Matrix2c<Scalar> from_bloch(const Vector3<Scalar>& v, Scalar c = Scalar(1)) {
  using C = std::complex<Scalar>;
  Matrix2c<Scalar> m;
  m << C((c + v(2)) / Scalar(2)), C(v(0) / Scalar(2), -v(1) / Scalar(2)),
      C(v(0) / Scalar(2), v(1) / Scalar(2)), C((c - v(2)) / Scalar(2));
  return m;
}

// ---------------------------------------------------------------------------
// Thermal geometric sums.

/// sum_n p_n e^{i n phase} for the thermal distribution p_n = (1-q) q^n, q = e^{-beta}.
template <typename Scalar = double>
std::complex<Scalar> thermal_phase_sum(Scalar beta, Scalar phase) {
  using std::cos;
  using std::exp;
  using std::expm1;
  using std::sin;
  if (!(beta > Scalar(0))) {
    throw DomainError("thermal_phase_sum: beta must be positive");
  }
  const Scalar q = exp(-beta);
  const Scalar one_minus_q = -expm1(-beta);
  const std::complex<Scalar> denom(Scalar(1) - q * cos(phase), -q * sin(phase));
  return std::complex<Scalar>(one_minus_q) / denom;
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature.

template <typename Scalar = double>
struct QuadratureRule {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;
  int order = 0;
};

/**
 * Gauss-Hermite rule for the weight e^{-x^2}.
 *
 * Nodes are the eigenvalues of the symmetric Jacobi matrix (Golub-Welsch),
 * polished by Newton steps on the normalized Hermite function psi_n; weights
 * come from the Christoffel function 1 / sum_{k<n} p_k(x)^2. Internally long
 * double. Weights below the range of Scalar flush to zero (double, order > ~370).
 */
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_hermite_rule(int order) {
  if (order < 1 || order > 512) {
    throw DomainError("gauss_hermite_rule: order must be in [1, 512]");
  }
  using L = long double;
  const int n = order;

  std::vector<L> x(n);
  if (n == 1) {
    x[0] = 0;
  } else {
    Eigen::Matrix<L, Eigen::Dynamic, 1> diag = Eigen::Matrix<L, Eigen::Dynamic, 1>::Zero(n);
    Eigen::Matrix<L, Eigen::Dynamic, 1> sub(n - 1);
    for (int k = 1; k < n; ++k) {
      sub(k - 1) = std::sqrt(static_cast<L>(k) / 2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<L, Eigen::Dynamic, Eigen::Dynamic>> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) {
      x[i] = solver.eigenvalues()(i);
    }
  }

  // psi_k(x) = p_k(x) e^{-x^2/2}, p_k orthonormal for e^{-x^2}.
  const L pi_quarter = std::pow(std::numbers::pi_v<L>, L(-0.25));
  auto hermite_functions = [&](L at, L& psi_n, L& psi_nm1, L& sum_sq) {
    L prev = 0;
    L cur = pi_quarter * std::exp(-at * at / 2);
    sum_sq = 0;
    for (int k = 0; k < n; ++k) {
      sum_sq += cur * cur;
      const L next = at * std::sqrt(L(2) / (k + 1)) * cur - std::sqrt(static_cast<L>(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
    }
    psi_n = cur;
    psi_nm1 = prev;
  };

  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 3; ++it) {
      L psi_n, psi_nm1, sum_sq;
      hermite_functions(x[i], psi_n, psi_nm1, sum_sq);
      const L deriv = std::sqrt(L(2) * n) * psi_nm1 - x[i] * psi_n;
      if (deriv == 0) {
        break;
      }
      x[i] -= psi_n / deriv;
    }
  }
  for (int i = 0; i < n / 2; ++i) {
    const L sym = (x[n - 1 - i] - x[i]) / 2;
    x[i] = -sym;
    x[n - 1 - i] = sym;
  }
  if (n % 2 == 1) {
    x[n / 2] = 0;
  }

  QuadratureRule<Scalar> rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    L psi_n, psi_nm1, sum_sq;
    hermite_functions(x[i], psi_n, psi_nm1, sum_sq);
    rule.nodes[i] = static_cast<Scalar>(x[i]);
    rule.weights[i] = static_cast<Scalar>(std::exp(-x[i] * x[i]) / sum_sq);
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Differentiation.

/// Five-point central difference f'(x); works for scalar- and matrix-valued f.
template <typename F, typename Scalar>
auto finite_diff(F&& f, Scalar x, Scalar h) {
  using Result = std::decay_t<decltype(f(x))>;
  const Result fm2 = f(x - Scalar(2) * h);
  const Result fm1 = f(x - h);
  const Result fp1 = f(x + h);
  const Result fp2 = f(x + Scalar(2) * h);
  Result out = (fm2 - Scalar(8) * fm1 + Scalar(8) * fp1 - fp2) / (Scalar(12) * h);
  return out;
}

}  // namespace qthermo
