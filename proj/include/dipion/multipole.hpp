#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Reduction of a finite planar point-charge cluster to monopole + dipole
// parameters (Q, D, axis) and the truncation error of that approximation.

namespace dipion::multipole {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct PointCharge {
  double q = 0.0;
  Vec2 pos;
};

struct ChargeCluster {
  std::vector<PointCharge> charges;
  Vec2 origin;  // expansion center; D depends on it when Q != 0
};

// Monopole strength, dipole magnitude and unit axis. axis = +x when D = 0
// so reduce stays deterministic.
struct Reduction {
  double Q = 0.0;
  double D = 0.0;
  std::array<double, 2> axis{1.0, 0.0};
};

class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Reduction reduce(const ChargeCluster& cluster);

// Sum_j q_j / |point - a_j| (Rydberg units). Throws on coincidence with a
// charge position.
double exact_potential(const ChargeCluster& cluster, Vec2 point);

// Q/r + D cos(theta)/r^2, theta measured from the dipole axis.
double multipole_potential(double Q, double D, double r, double theta);

// Relative error |exact - multipole|/|exact| at radius r_i from the
// cluster origin along the direction at angle theta from the dipole axis.
// Intended for log-log slope fits of the remainder.
std::vector<double> truncation_error(const ChargeCluster& cluster, double theta,
                                     std::span<const double> radii);

// Cluster file schema: either a bare JSON array of {"q":..., "x":..., "y":...}
// objects (origin defaults to [0,0]) or {"charges": [...], "origin": [x, y]}.
// Throws std::invalid_argument on malformed input or an empty cluster.
ChargeCluster load_cluster(std::istream& in);
ChargeCluster load_cluster_file(const std::string& path);

}  // namespace dipion::multipole
