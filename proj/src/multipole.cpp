#include "dipion/multipole.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <istream>

namespace dipion::multipole {

Reduction reduce(const ChargeCluster& cluster) {
  if (cluster.charges.empty()) throw std::invalid_argument("reduce: empty cluster");
  Reduction out;
  double dx = 0.0;
  double dy = 0.0;
  for (const auto& c : cluster.charges) {
    out.Q += c.q;
    dx += c.q * (c.pos.x - cluster.origin.x);
    dy += c.q * (c.pos.y - cluster.origin.y);
  }
  out.D = std::hypot(dx, dy);
  if (out.D > 0.0) {
    out.axis = {dx / out.D, dy / out.D};
  }  // else keep the +x convention
  return out;
}

double exact_potential(const ChargeCluster& cluster, Vec2 point) {
  if (cluster.charges.empty()) throw std::invalid_argument("exact_potential: empty cluster");
  double v = 0.0;
  for (const auto& c : cluster.charges) {
    const double d = std::hypot(point.x - c.pos.x, point.y - c.pos.y);
    if (d == 0.0) throw SingularPointError("exact_potential: point coincides with a charge");
    v += c.q / d;
  }
  return v;
}

double multipole_potential(double Q, double D, double r, double theta) {
  if (r <= 0.0) throw SingularPointError("multipole_potential: requires r > 0");
  return Q / r + D * std::cos(theta) / (r * r);
}

std::vector<double> truncation_error(const ChargeCluster& cluster, double theta,
                                     std::span<const double> radii) {
  const Reduction red = reduce(cluster);
  // direction at angle theta from the dipole axis
  const double ux = red.axis[0] * std::cos(theta) - red.axis[1] * std::sin(theta);
  const double uy = red.axis[0] * std::sin(theta) + red.axis[1] * std::cos(theta);

  std::vector<double> errors;
  errors.reserve(radii.size());
  for (double r : radii) {
    if (r <= 0.0) throw SingularPointError("truncation_error: requires r > 0");
    const Vec2 point{cluster.origin.x + r * ux, cluster.origin.y + r * uy};
    const double exact = exact_potential(cluster, point);
    if (exact == 0.0) {
      throw SingularPointError("truncation_error: reference potential vanishes at r");
    }
    const double approx = multipole_potential(red.Q, red.D, r, theta);
    errors.push_back(std::abs(exact - approx) / std::abs(exact));
  }
  return errors;
}

namespace {

ChargeCluster cluster_from_json(const nlohmann::json& j) {
  ChargeCluster cluster;
  const nlohmann::json* items = nullptr;
  if (j.is_array()) {
    items = &j;
  } else if (j.is_object()) {
    if (!j.contains("charges") || !j["charges"].is_array()) {
      throw std::invalid_argument("cluster file: object form requires a \"charges\" array");
    }
    items = &j["charges"];
    if (j.contains("origin")) {
      const auto& o = j["origin"];
      if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number()) {
        throw std::invalid_argument("cluster file: \"origin\" must be [x, y]");
      }
      cluster.origin = {o[0].get<double>(), o[1].get<double>()};
    }
  } else {
    throw std::invalid_argument("cluster file: top level must be an array or an object");
  }

  for (const auto& item : *items) {
    if (!item.is_object() || !item.contains("q") || !item.contains("x") || !item.contains("y")
        || !item["q"].is_number() || !item["x"].is_number() || !item["y"].is_number()) {
      throw std::invalid_argument("cluster file: each charge must be {\"q\", \"x\", \"y\"}");
    }
    cluster.charges.push_back(
        {item["q"].get<double>(), {item["x"].get<double>(), item["y"].get<double>()}});
  }
  if (cluster.charges.empty()) throw std::invalid_argument("cluster file: no charges");
  return cluster;
}

}  // namespace

ChargeCluster load_cluster(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("cluster file: ") + e.what());
  }
  return cluster_from_json(j);
}

ChargeCluster load_cluster_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cluster file: cannot open " + path);
  return load_cluster(in);
}

}  // namespace dipion::multipole
