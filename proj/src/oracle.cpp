#include "dipion/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dipion::oracle {

namespace {

// Regular solution near the origin: R = r^lambda sum_k c_k r^k with
//   c_0 = 1,  k (2 lambda + k - 1) c_k = -(2 c_{k-1} + E c_{k-2})
// straight from the ODE; converges fast for the tiny radii where it is
// used to seed the integration.
double series_start(double lambda, double E, double r) {
  double sum = 1.0;
  double ckm1 = 1.0;
  double ckm2 = 0.0;
  double rk = 1.0;
  for (int k = 1; k <= 40; ++k) {
    const double ck = -(2.0 * ckm1 + E * ckm2) / (k * (2.0 * lambda + k - 1.0));
    rk *= r;
    const double term = ck * rk;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    ckm2 = ckm1;
    ckm1 = ck;
  }
  return std::pow(r, lambda) * sum;
}

struct ShotResult {
  int nodes = 0;
  double tail_ratio = 0.0;  // |y(r_max)| / max |y|
};

// One Numerov sweep of R'' = -g(r) R, g = E + 2/r + (E_theta + 1/4)/r^2,
// counting interior sign changes. The finite-difference grid starts at
// r_start = max(r_min, 0.03): closer in, h^2 g is no longer small against
// the 1/r^2 term and the update degrades. The regular solution defined by
// the r^lambda boundary data is carried to r_start with the exact power
// series (entire in r), and it has no zeros below r_start: there the
// series bracket 1 + c_1 r + ... stays within a few percent of 1, so the
// reported node count covers all of (0, r_max).
ShotResult shoot_once(double E, double lambda, double coef, const ShootingConfig& cfg) {
  const double h = (cfg.r_max - cfg.r_min) / cfg.steps;
  const double h2_12 = h * h / 12.0;
  const double r_start = std::max(cfg.r_min, 0.03);
  const int n_steps = int((cfg.r_max - r_start) / h);
  auto g = [&](double r) { return E + 2.0 / r + coef / (r * r); };

  double y_prev = series_start(lambda, E, r_start);
  double y_cur = series_start(lambda, E, r_start + h);
  double f_prev = 1.0 + h2_12 * g(r_start);
  double f_cur = 1.0 + h2_12 * g(r_start + h);

  ShotResult res;
  double peak = std::max(std::abs(y_prev), std::abs(y_cur));
  int last_sign = (y_prev > 0.0) ? 1 : (y_prev < 0.0 ? -1 : 0);
  if (y_cur != 0.0) {
    const int s = y_cur > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++res.nodes;
    last_sign = s;
  }

  for (int i = 2; i <= n_steps; ++i) {
    const double r_next = r_start + i * h;
    const double f_next = 1.0 + h2_12 * g(r_next);
    const double y_next = ((12.0 - 10.0 * f_cur) * y_cur - f_prev * y_prev) / f_next;
    if (!std::isfinite(y_next)) break;  // diverged hard; node count stands
    if (y_next != 0.0) {
      const int s = y_next > 0.0 ? 1 : -1;
      if (last_sign != 0 && s != last_sign) ++res.nodes;
      last_sign = s;
    }
    peak = std::max(peak, std::abs(y_next));
    y_prev = y_cur;
    y_cur = y_next;
    f_prev = f_cur;
    f_cur = f_next;
  }
  res.tail_ratio = (peak > 0.0) ? std::abs(y_cur) / peak : 0.0;
  return res;
}

}  // namespace

ShootingConfig shooting_config_for(double E_theta, int node_count) {
  const double lambda = 0.5 + std::sqrt(std::max(0.0, -E_theta));
  const double L = node_count + lambda;  // outer length scale 1/beta
  // Classical turning point sits near 2 L^2, and each further decay length
  // L damps the tail by e. Sixteen decay lengths put the box-truncation
  // shift far below the 1e-6 relative target while keeping the forbidden
  // region short enough that the bisection residue (which grows at the
  // same exponential rate) stays small against the solution peak. A much
  // longer domain is not a luxury but a failure mode.
  ShootingConfig cfg;
  cfg.r_min = 1e-6;
  cfg.r_max = std::max(10.0, 2.0 * L * L + 16.0 * L);
  cfg.steps = std::clamp(int((cfg.r_max - cfg.r_min) / 1e-3), 1000, 400000);
  cfg.match_tol = 1e-10;
  return cfg;
}

double radial_eigenvalue_shoot(double E_theta, int node_count, const ShootingConfig& cfg) {
  if (E_theta > 0.0) throw std::invalid_argument("radial_eigenvalue_shoot: E_theta must be <= 0");
  if (node_count < 0) throw std::invalid_argument("radial_eigenvalue_shoot: node_count >= 0");
  if (!(cfg.r_min > 0.0) || !(cfg.r_max > cfg.r_min) || cfg.steps < 1000) {
    throw std::invalid_argument("radial_eigenvalue_shoot: invalid ShootingConfig");
  }

  const double lambda = 0.5 + std::sqrt(-E_theta);
  const double coef = E_theta + 0.25;

  // The node count of the outward-integrated regular solution equals the
  // number of radial eigenvalues below E, so the n_r-th eigenvalue is the
  // jump of that count from node_count to node_count + 1. The spectrum of
  // this family lies above -4 (E = -1/(n_r + lambda)^2 with lambda > 1/2),
  // so [-4.5, ~0) brackets every level; a violation throws rather than
  // silently bending the answer.
  double e_lo = -4.5;
  double e_hi = -1e-12;
  if (shoot_once(e_lo, lambda, coef, cfg).nodes > node_count) {
    throw spectrum::BracketError("radial_eigenvalue_shoot: node count nonzero at the lower"
                                 " bracket edge");
  }
  if (shoot_once(e_hi, lambda, coef, cfg).nodes <= node_count) {
    throw spectrum::BracketError("radial_eigenvalue_shoot: node count too low near E = 0;"
                                 " r_max likely too small for this state");
  }

  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (e_lo + e_hi);
    if (shoot_once(mid, lambda, coef, cfg).nodes > node_count)
      e_hi = mid;
    else
      e_lo = mid;
    if (e_hi - e_lo < std::max(cfg.match_tol, 4.0 * eps * std::abs(mid))) break;
  }

  // e_lo sits just below the eigenvalue: exactly node_count sign changes,
  // tail still decaying
  const ShotResult final_shot = shoot_once(e_lo, lambda, coef, cfg);
  if (final_shot.tail_ratio > 0.9) {
    throw spectrum::BracketError("radial_eigenvalue_shoot: no tail decay at the converged"
                                 " energy; integration domain unsuitable");
  }
  return e_lo;
}

namespace {

// adaptive Simpson with an explicit stack; err accumulates the accepted
// panel estimates
struct Panel {
  double a, fa, b, fb, m, fm, whole;
  int depth;
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        double& err_out) {
  auto simpson = [](double fa, double fm, double fb, double width) {
    return width / 6.0 * (fa + 4.0 * fm + fb);
  };
  // Seed with many uniform panels, not one: a single whole-interval panel
  // can sample past a narrow peak on both sides, agree with its own
  // refinement that nothing is there, and drop the feature entirely.
  const int seeds = 48;
  std::vector<Panel> stack;
  stack.reserve(seeds + 64);
  const double w = (b - a) / seeds;
  double f_right = f(a);
  for (int j = 0; j < seeds; ++j) {
    const double pa = a + j * w;
    const double pb = (j + 1 == seeds) ? b : pa + w;
    const double pm = 0.5 * (pa + pb);
    const double fa = f_right;
    const double fb = f(pb);
    const double fm = f(pm);
    f_right = fb;
    stack.push_back({pa, fa, pb, fb, pm, fm, simpson(fa, fm, fb, pb - pa), 0});
  }
  double total = 0.0;
  double err = 0.0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(p.fa, flm, p.fm, p.m - p.a);
    const double right = simpson(p.fm, frm, p.fb, p.b - p.m);
    const double delta = left + right - p.whole;
    if (p.depth >= 48 || std::abs(delta) <= 15.0 * tol * (p.b - p.a)) {
      total += left + right + delta / 15.0;  // Richardson correction
      err += std::abs(delta) / 15.0;
    } else {
      stack.push_back({p.a, p.fa, p.m, p.fm, lm, flm, left, p.depth + 1});
      stack.push_back({p.m, p.fm, p.b, p.fb, rm, frm, right, p.depth + 1});
    }
  }
  err_out = err;
  return total;
}

}  // namespace

QuadratureResult integrate_polar(const std::function<double(double, double)>& f, double r_max,
                                 int theta_points, double rel_tol) {
  if (theta_points < 4) throw std::invalid_argument("integrate_polar: too few theta points");
  // periodic trapezoid in theta (exact for band-limited integrands),
  // adaptive Simpson in r
  const double two_pi = 6.283185307179586;
  const double dtheta = two_pi / theta_points;
  QuadratureResult out;
  for (int j = 0; j < theta_points; ++j) {
    const double theta = j * dtheta;
    double err = 0.0;
    const double slice = adaptive_simpson(
        [&](double r) { return f(r, theta) * r; }, 0.0, r_max, rel_tol / two_pi, err);
    out.value += slice * dtheta;
    out.error += err * dtheta;
  }
  return out;
}

QuadratureResult norm_quadrature(const spectrum::BoundState& state,
                                 const mathieu::MathieuSolution& sol, double rel_tol) {
  // radial cutoff: walk out until the integrand envelope is negligible
  const double grow = 2.0 * (state.n_r + state.lambda) + 1.0;  // power of r in |psi|^2 r
  double r_cut = (grow + 2.0) / (2.0 * state.beta);
  while (2.0 * state.beta * r_cut - grow * std::log(r_cut + 1.0) < 46.0) r_cut *= 1.25;

  // the angular factor ce^2(theta/2) is band-limited by the coefficient
  // tail: size the trapezoid so it integrates that band exactly
  int k_sig = 1;
  for (int k = 0; k < sol.truncation; ++k) {
    if (std::abs(sol.coeffs[k]) > 1e-14) k_sig = k + 1;
  }
  const int theta_points = std::max(64, 4 * k_sig + 8);

  return integrate_polar(
      [&](double r, double theta) {
        const double psi = spectrum::wavefunction_eval(state, sol, r, theta);
        return psi * psi;
      },
      r_cut, theta_points, rel_tol);
}

std::vector<std::pair<int, double>> convergence_report(int m, double p,
                                                       std::span<const int> K_list) {
  std::vector<std::pair<int, double>> rows;
  rows.reserve(K_list.size());
  int prev = 0;
  for (int K : K_list) {
    if (K <= prev) throw std::invalid_argument("convergence_report: K_list must be ascending");
    prev = K;
    rows.emplace_back(K, mathieu::char_value_fixed(m, p, K));
  }
  return rows;
}

}  // namespace dipion::oracle
