#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dipion/mathieu.hpp"
#include "dipion/spectrum.hpp"

// Brute-force verification of the analytic pipeline. The shooting solver
// integrates the radial ODE directly and never touches the closed-form
// energy; the quadrature integrates |psi|^2 through the wavefunction
// evaluator as a black box.

namespace dipion::oracle {

struct ShootingConfig {
  double r_min = 1e-6;
  double r_max = 60.0;
  int steps = 60000;
  double match_tol = 1e-10;  // bisection width on E
};

// Domain/grid sized from the state's length scale L = node_count + lambda
// (outer turning point ~ 2L^2, decay length ~ L). Uses only the indicial
// exponent and the requested node count, nothing from the energy formula.
ShootingConfig shooting_config_for(double E_theta, int node_count);

// Numerov integration of R'' + [E + 2/r + (E_theta + 1/4)/r^2] R = 0 from
// r_min (series-start boundary values ~ r^lambda) with bisection on E: the
// returned E has exactly node_count interior sign changes and a decaying
// tail. Throws spectrum::BracketError if no bracket exists.
double radial_eigenvalue_shoot(double E_theta, int node_count, const ShootingConfig& cfg);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated error estimate
};

// Integrates f(r, theta) * r over the disk r < r_max. theta by the periodic
// trapezoid rule (spectrally exact for band-limited integrands), r by
// adaptive Simpson.
QuadratureResult integrate_polar(const std::function<double(double, double)>& f,
                                 double r_max, int theta_points, double rel_tol);

// integral |psi|^2 r dr dtheta for the given state; expected 1 within the
// quadrature tolerance once the closed-form normalization is applied.
QuadratureResult norm_quadrature(const spectrum::BoundState& state,
                                 const mathieu::MathieuSolution& sol,
                                 double rel_tol = 1e-9);

// Characteristic-value estimates at each truncation in ascending K_list;
// the successive differences must shrink once K clears the transient.
std::vector<std::pair<int, double>> convergence_report(int m, double p,
                                                       std::span<const int> K_list);

}  // namespace dipion::oracle
