#include "dipion/spectrum.hpp"

#include <cmath>

namespace dipion::spectrum {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
// |E_theta| below this is treated as exactly 0 (marginal state at D_crit);
// above it, positive E_theta means no bound state. Keeps D-sweeps free of
// tolerance-dependent rejections right at the threshold.
constexpr double kMarginTol = 1e-9;

// E_theta series for m <= 3 as printed (the D-space form of the
// characteristic-value series), m > 3 through the p-series conversion.
double angular_series(int m, double D) {
  const double D2 = D * D;
  const double D4 = D2 * D2;
  const double D6 = D4 * D2;
  switch (m) {
    case 0:
      return D2 - (7.0 / 8.0) * D4 + (29.0 / 18.0) * D6;
    case 1:
      return -1.0 - (5.0 / 6.0) * D2 + (763.0 / 864.0) * D4 - (1002401.0 / 622080.0) * D6;
    case 2:
      return -4.0 - (1.0 / 15.0) * D2 + (433.0 / 54000.0) * D4 + (5701.0 / 21262500.0) * D6;
    case 3:
      return -9.0 - (1.0 / 35.0) * D2 - (187.0 / 2744000.0) * D4
             - (6743617.0 / 726062400000.0) * D6;
    default:
      return -mathieu::char_value_series(m, p_from_dipole(D)) / 4.0;
  }
}

// 1F1(-n_r, 2 lambda, x) as the degree-n_r polynomial: generalized
// Laguerre recurrence times n_r! Gamma(2 lambda) / Gamma(n_r + 2 lambda).
double hyp_poly(int n_r, double two_lambda, double x) {
  if (n_r == 0) return 1.0;
  const double alpha = two_lambda - 1.0;
  double l_prev = 1.0;
  double l = 1.0 + alpha - x;
  for (int k = 1; k < n_r; ++k) {
    const double l_next = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * l_prev) / (k + 1.0);
    l_prev = l;
    l = l_next;
  }
  const double ln_scale =
      std::lgamma(n_r + 1.0) + std::lgamma(two_lambda) - std::lgamma(n_r + two_lambda);
  return std::exp(ln_scale) * l;
}

}  // namespace

double p_from_dipole(double D) { return -2.0 * kSqrt2 * D; }

AngularMode angular_eigenvalue(int m, double D, EvalMethod method, double tol) {
  if (m < 0) throw std::invalid_argument("angular_eigenvalue: m must be >= 0");
  if (D < 0.0) throw std::invalid_argument("angular_eigenvalue: D must be >= 0");

  AngularMode mode;
  mode.m = m;
  mode.D = D;
  mode.p = p_from_dipole(D);

  EvalMethod used = method;
  if (method == EvalMethod::automatic) {
    used = (std::abs(mode.p) <= 0.5) ? EvalMethod::series : EvalMethod::matrix;
  }
  if (used == EvalMethod::series) {
    mode.E_theta = angular_series(m, D);
  } else {
    mode.E_theta = -mathieu::char_value_matrix(m, mode.p, tol).a / 4.0;
  }
  mode.method = used;
  return mode;
}

double critical_dipole(int m, double tol) {
  if (m < 0) throw std::invalid_argument("critical_dipole: m must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("critical_dipole: tol must be > 0");
  if (m == 0) return 0.0;  // a_0 <= 0 everywhere; the root sits at p = 0

  const double char_tol = 1e-12;
  auto char_at = [&](double q) { return mathieu::char_value_matrix(m, q, char_tol).a; };

  // a_{2m}(0) = 4m^2 > 0 and a_{2m} -> -inf: scan geometrically for the
  // sign change, then bisect
  double lo = 0.0;
  double hi = 2.0 * m;
  int scans = 0;
  while (char_at(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++scans > 60) throw BracketError("critical_dipole: geometric scan found no sign change");
  }
  const double width_tol = std::max(tol * 2.0 * kSqrt2, 1e-13 * hi);
  while (hi - lo > width_tol) {
    const double mid = 0.5 * (lo + hi);
    if (char_at(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / (2.0 * kSqrt2);
}

BoundState energy(int n, int m, double D, EvalMethod method, double tol) {
  m = std::abs(m);  // only cosine angular solutions exist
  if (n < m) throw std::invalid_argument("energy: requires n >= |m|");
  if (D < 0.0) throw std::invalid_argument("energy: D must be >= 0");

  const AngularMode mode = angular_eigenvalue(m, D, method, tol);
  double e_theta = mode.E_theta;
  if (e_theta > kMarginTol) {
    throw NoBoundStateError("energy: E_theta > 0, the (m, D) state is unbound"
                            " (D exceeds the critical dipole moment)",
                            e_theta);
  }

  BoundState st;
  st.n = n;
  st.m = m;
  st.n_r = n - m;
  st.D = D;
  st.marginal = (e_theta > -kMarginTol);
  if (st.marginal) e_theta = 0.0;
  st.E_theta = e_theta;
  st.lambda = 0.5 + std::sqrt(-e_theta);
  st.beta = 1.0 / (st.n_r + st.lambda);
  st.energy = -st.beta * st.beta;
  st.norm = normalization(st);
  return st;
}

double radial_eval(const BoundState& state, double r) {
  if (r < 0.0) throw std::invalid_argument("radial_eval: r must be >= 0");
  if (r == 0.0) return 0.0;  // lambda >= 1/2 > 0
  const double x = 2.0 * state.beta * r;
  return std::pow(r, state.lambda) * std::exp(-state.beta * r)
         * hyp_poly(state.n_r, 2.0 * state.lambda, x);
}

double normalization(const BoundState& state) {
  // N = (2 beta)^(lambda + 1/2) / Gamma(2 lambda)
  //     * sqrt( Gamma(n_r + 2 lambda) / (n_r! * 2 (n_r + lambda)) )
  // from the Laguerre orthogonality identity with weight (2 n_r + k + 1)
  const double two_lambda = 2.0 * state.lambda;
  const double ln_n = (state.lambda + 0.5) * std::log(2.0 * state.beta) - std::lgamma(two_lambda)
                      + 0.5 * (std::lgamma(state.n_r + two_lambda) - std::lgamma(state.n_r + 1.0)
                               - std::log(2.0 * (state.n_r + state.lambda)));
  return std::exp(ln_n);
}

double wavefunction_eval(const BoundState& state, const mathieu::MathieuSolution& sol, double r,
                         double theta) {
  if (r < 0.0) throw std::invalid_argument("wavefunction_eval: r must be >= 0");
  if (sol.m != state.m
      || std::abs(sol.p - p_from_dipole(state.D)) > 1e-9 * (1.0 + std::abs(sol.p))) {
    throw std::invalid_argument("wavefunction_eval: MathieuSolution does not match the state's"
                                " (m, D)");
  }
  constexpr double kInvSqrtPi = 0.5641895835477563;  // angular factor has unit L2 norm
  const double angular = mathieu::ce_eval(sol, 0.5 * theta) * kInvSqrtPi;
  const double radial = std::pow(r, state.lambda - 0.5) * std::exp(-state.beta * r)
                        * hyp_poly(state.n_r, 2.0 * state.lambda, 2.0 * state.beta * r);
  return state.norm * radial * angular;
}

}  // namespace dipion::spectrum
