#include "dipion/mathieu.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace dipion::mathieu {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr int kMaxRows = 1 << 14;

// Even pi-periodic solutions ce_{2m} = sum A_{2k} cos 2kz satisfy
//   a A_0          = p A_2
//   (a - 4) A_2    = p (2 A_0 + A_4)
//   (a - 4k^2) A_{2k} = p (A_{2k-2} + A_{2k+2}),  k >= 2.
// With B_0 = sqrt(2) A_0, B_k = A_{2k} this is a symmetric tridiagonal
// eigenproblem: diag(0, 4, 16, ...), off-diagonal (sqrt(2) p, p, p, ...).
void build_tridiagonal(double q, int rows, Eigen::VectorXd& diag, Eigen::VectorXd& sub) {
  diag.resize(rows);
  sub.resize(rows - 1);
  for (int k = 0; k < rows; ++k) diag[k] = 4.0 * double(k) * double(k);
  for (int k = 0; k + 1 < rows; ++k) sub[k] = q;
  sub[0] = kSqrt2 * q;
}

double eigenvalue_only(int m, double q, int rows) {
  Eigen::VectorXd diag, sub;
  build_tridiagonal(q, rows, diag, sub);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[m];  // ascending order
}

int initial_truncation(int m, double q) {
  int rows = std::max(25, 3 * m + 10);
  int from_p = int(std::ceil(2.0 * std::sqrt(q))) + 10;
  return std::max(rows, from_p);
}

}  // namespace

double char_value_series(int m, double p) {
  if (m < 0) throw std::invalid_argument("char_value_series: m must be >= 0");
  const double p2 = p * p;
  const double p4 = p2 * p2;
  const double p6 = p4 * p2;
  switch (m) {
    case 0:
      return -0.5 * p2 + (7.0 / 128.0) * p4 - (29.0 / 2304.0) * p6;
    case 1:
      return 4.0 + (5.0 / 12.0) * p2 - (763.0 / 13824.0) * p4 + (1002401.0 / 79626240.0) * p6;
    case 2:
      return 16.0 + (1.0 / 30.0) * p2 + (433.0 / 864000.0) * p4 - (5701.0 / 2721600000.0) * p6;
    case 3:
      return 36.0 + (1.0 / 70.0) * p2 + (187.0 / 43904000.0) * p4
             + (6743617.0 / 92935987200000.0) * p6;
    default: {
      // common large-order expression, valid once the a/b splitting is
      // beyond O(p^6), i.e. m > 3
      const double mm = double(m) * double(m);
      const double M = 4.0 * mm;  // (2m)^2
      const double m4 = mm * mm;
      const double d1 = M - 1.0;
      const double d4 = M - 4.0;
      const double d9 = M - 9.0;
      const double d1_3 = d1 * d1 * d1;
      const double d1_5 = d1_3 * d1 * d1;
      return M + p2 / (2.0 * d1) + (20.0 * mm + 7.0) * p4 / (32.0 * d1_3 * d4)
             + (36.0 * m4 + 232.0 * mm + 29.0) * p6 / (64.0 * d1_5 * d4 * d9);
    }
  }
}

MathieuSolution char_value_matrix(int m, double p, double tol) {
  if (m < 0) throw std::invalid_argument("char_value_matrix: m must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("char_value_matrix: tol must be > 0");
  if (!std::isfinite(p)) throw std::invalid_argument("char_value_matrix: p must be finite");

  const double q = std::abs(p);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double eps = std::numeric_limits<double>::epsilon();

  int rows = initial_truncation(m, q);
  if (rows > kMaxRows) {
    throw ConvergenceError("char_value_matrix: initial truncation exceeds the row cap", nan, nan);
  }

  double previous = eigenvalue_only(m, q, rows);
  double a = previous;
  while (true) {
    if (2 * rows > kMaxRows) {
      throw ConvergenceError("char_value_matrix: row cap reached before |da| < tol", a, previous);
    }
    rows *= 2;
    a = eigenvalue_only(m, q, rows);
    // floor: eigenvalue rounding noise scales with the matrix norm, so a
    // bare |da| < tol comparison would double forever at large truncation
    const double floor = 0.5 * eps * (4.0 * double(rows) * double(rows) + 2.0 * kSqrt2 * q);
    if (std::abs(a - previous) < std::max(tol, floor)) break;
    previous = a;
  }

  // eigenvector only at the final truncation
  Eigen::VectorXd diag, sub;
  build_tridiagonal(q, rows, diag, sub);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  Eigen::VectorXd B = solver.eigenvectors().col(m);  // unit Euclidean norm

  // sign convention: A_{2m} > 0 (fall back to the dominant component if
  // the m-th one underflows)
  double anchor = B[m];
  if (std::abs(anchor) < 1e-12) {
    int imax = 0;
    for (int k = 1; k < rows; ++k)
      if (std::abs(B[k]) > std::abs(B[imax])) imax = k;
    anchor = B[imax];
  }
  if (anchor < 0.0) B = -B;

  MathieuSolution sol;
  sol.m = m;
  sol.p = p;
  sol.a = solver.eigenvalues()[m];
  sol.truncation = rows;
  sol.method = Method::matrix;
  sol.coeffs.resize(rows);
  sol.coeffs[0] = B[0] / kSqrt2;  // undo the symmetrizing rescale
  for (int k = 1; k < rows; ++k) sol.coeffs[k] = B[k];
  if (p < 0.0) {
    // z -> pi/2 - z maps the (a, |p|) solution onto (a, p): cos 2kz picks
    // up (-1)^k; validated by the ODE-residual tests
    for (int k = 1; k < rows; k += 2) sol.coeffs[k] = -sol.coeffs[k];
  }
  return sol;
}

double char_value_fixed(int m, double p, int truncation) {
  if (m < 0) throw std::invalid_argument("char_value_fixed: m must be >= 0");
  if (truncation <= m) throw std::invalid_argument("char_value_fixed: truncation must exceed m");
  if (truncation > kMaxRows) throw std::invalid_argument("char_value_fixed: truncation above row cap");
  return eigenvalue_only(m, std::abs(p), truncation);
}

double ce_eval(const MathieuSolution& sol, double z) {
  double sum = 0.0;
  for (int k = 0; k < sol.truncation; ++k) sum += sol.coeffs[k] * std::cos(2.0 * k * z);
  return sum;
}

double ode_residual(const MathieuSolution& sol, std::span<const double> z_samples) {
  double worst = 0.0;
  for (double z : z_samples) {
    double ce = 0.0;
    double ce_dd = 0.0;
    for (int k = 0; k < sol.truncation; ++k) {
      const double c = std::cos(2.0 * k * z);
      ce += sol.coeffs[k] * c;
      ce_dd += sol.coeffs[k] * (-4.0 * double(k) * double(k)) * c;
    }
    const double resid = std::abs(ce_dd + (sol.a - 2.0 * sol.p * std::cos(2.0 * z)) * ce);
    worst = std::max(worst, resid);
  }
  return worst;
}

}  // namespace dipion::mathieu
