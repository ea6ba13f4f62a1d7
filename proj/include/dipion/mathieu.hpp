#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Characteristic values a_{2m}(p) and even pi-periodic eigenfunctions
// ce_{2m}(z; p) of the Mathieu equation  y'' + (a - 2p cos 2z) y = 0,
// computed two ways: small-p asymptotic series and an exact truncated
// tridiagonal eigenproblem built from the three-term recurrence of the
// Fourier-cosine coefficients.

namespace dipion::mathieu {

enum class Method { series, matrix };

// One converged eigensolution: characteristic value plus the Fourier
// coefficients A_{2k} of ce_{2m}(z) = sum_k A_{2k} cos(2kz).
//
// Normalization convention (classical): integral_0^{2pi} ce^2 dz = pi,
// i.e. 2*A_0^2 + sum_{k>=1} A_{2k}^2 = 1, so ce_0(z;0) = 1/sqrt(2) and
// ce_{2m}(z;0) = cos 2mz. Sign is fixed by A_{2m} > 0 (evaluated before
// the negative-p parity transform).
struct MathieuSolution {
  int m = 0;
  double p = 0.0;
  double a = 0.0;
  std::vector<double> coeffs;  // A_{2k}, k = 0..truncation-1
  int truncation = 0;
  Method method = Method::matrix;
};

// Adaptive truncation failed to reach the requested tolerance before the
// row cap; carries the last two eigenvalue estimates (NaN if fewer than
// two were computed).
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last, double previous)
      : std::runtime_error(what), last_estimate(last), previous_estimate(previous) {}
  double last_estimate;
  double previous_estimate;
};

// Asymptotic series for a_{2m}(p), truncated at O(p^8). Closed-form
// polynomials for m <= 3, the common large-order expression for m > 3.
// Trust region |p| <= 0.5; the matrix method is ground truth elsewhere.
double char_value_series(int m, double p);

// Exact a_{2m}(p) and coefficients from the symmetrized tridiagonal
// truncation of the recurrence, truncation doubled until the eigenvalue
// settles to within tol (plus a rounding floor that scales with the
// matrix norm). Even in p; for p < 0 the coefficients carry the parity
// transform A_{2k} -> (-1)^k A_{2k}.
MathieuSolution char_value_matrix(int m, double p, double tol = 1e-12);

// Characteristic value at one fixed truncation K, no adaptivity. Used by
// convergence studies.
double char_value_fixed(int m, double p, int truncation);

// ce_{2m}(z; p) from the stored coefficients.
double ce_eval(const MathieuSolution& sol, double z);

// Max over samples of |ce''(z) + (a - 2p cos 2z) ce(z)| with ce'' taken
// from the analytic series (term-by-term differentiation), not finite
// differences. Self-check of a converged solution.
double ode_residual(const MathieuSolution& sol, std::span<const double> z_samples);

}  // namespace dipion::mathieu
