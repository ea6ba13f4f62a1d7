#pragma once

#include <stdexcept>
#include <string>

#include "dipion/mathieu.hpp"

// Bound-state spectrum of the planar potential V = Q/r + D cos(theta)/r^2
// with Q = 2 in Rydberg units (2m_e = hbar = e^2/2 = 4*pi*eps0 = 1).
// Separation in polar coordinates maps the angular equation onto the
// Mathieu problem (theta = 2z, a = -4 E_theta, p = -2 sqrt(2) D) and the
// radial equation onto a confluent-hypergeometric closed form.

namespace dipion::spectrum {

enum class EvalMethod { series, matrix, automatic };

// Angular eigenvalue E_theta^(2m)(D) = -a_{2m}(p)/4 with method metadata.
struct AngularMode {
  int m = 0;
  double D = 0.0;
  double E_theta = 0.0;
  EvalMethod method = EvalMethod::matrix;  // method actually used
  double p = 0.0;
};

// Bound state labeled by (n, m), n_r = n - m. Derived quantities:
//   lambda = 1/2 + sqrt(-E_theta)   (regular indicial root)
//   beta   = 1/(n_r + lambda)
//   energy = -beta^2
//   norm   = radial normalization constant N
// marginal is set when E_theta sits at 0 within tolerance (D = D_crit):
// the state is still accepted there since the energy stays finite.
struct BoundState {
  int n = 0;
  int m = 0;
  int n_r = 0;
  double D = 0.0;
  double E_theta = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double energy = 0.0;
  double norm = 0.0;
  bool marginal = false;
};

// E_theta > 0: the angular eigenvalue has crossed zero, no bound state
// exists for this (m, D). Always the case for m = 0, D > 0.
class NoBoundStateError : public std::runtime_error {
 public:
  NoBoundStateError(const std::string& what, double e_theta)
      : std::runtime_error(what), E_theta(e_theta) {}
  double E_theta;
};

// Geometric scan failed to bracket a root (signals an internal bug; the
// characteristic values decrease without bound in p).
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mathieu substitution p = -2 sqrt(2) D.
double p_from_dipole(double D);

// E_theta^(2m)(D). series: the printed D-polynomials for m <= 3 and the
// converted large-order series for m > 3; matrix: -a_{2m}(p)/4 from the
// eigensolve; automatic: series for |p| <= 0.5, matrix beyond.
AngularMode angular_eigenvalue(int m, double D, EvalMethod method = EvalMethod::automatic,
                               double tol = 1e-12);

// Smallest D >= 0 with a_{2m}(p(D)) = 0; exactly 0 for m = 0. Bisection
// on the matrix characteristic value after a geometric bracket scan.
double critical_dipole(int m, double tol = 1e-10);

// Full bound state for quantum numbers (n, m) at dipole moment D.
// Negative m is treated as |m| (only cosine angular solutions exist);
// requires n >= |m|. Throws NoBoundStateError when E_theta > 0.
BoundState energy(int n, int m, double D, EvalMethod method = EvalMethod::automatic,
                  double tol = 1e-12);

// Radial factor R(r) = r^lambda e^(-beta r) 1F1(-n_r, 2 lambda, 2 beta r),
// the hypergeometric polynomial evaluated through the generalized-Laguerre
// three-term recurrence.
double radial_eval(const BoundState& state, double r);

// Normalization constant N (log-gamma evaluation, no overflow) such that
// integral |psi|^2 r dr dtheta = 1 with the unit-norm angular factor.
double normalization(const BoundState& state);

// psi(r, theta) = N r^(lambda - 1/2) e^(-beta r) Theta(theta) 1F1(...),
// Theta(theta) = ce_{2m}(theta/2; p) / sqrt(pi) (unit angular norm).
// sol must come from the same (m, D).
double wavefunction_eval(const BoundState& state, const mathieu::MathieuSolution& sol,
                         double r, double theta);

}  // namespace dipion::spectrum
