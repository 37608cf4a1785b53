#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hamel/dynamics.hpp"

namespace hamel {

/// Knife-edge sleigh with the center of mass on the blade, inside the disk
/// x^2 + y^2 <= r^2. Configuration (x, y, theta).
struct SleighParams {
  double m = 1.0;
  double I = 1.0;
  double r = 1.0;
};

/// Vertical rolling disk in front of the wall y + R sin(phi) <= d.
/// Configuration (x, y, theta, phi).
struct DiskParams {
  double m = 1.0;
  double I = 1.0;
  double J = 1.0;
  double R = 1.0;
  double d = 10.0;
};

struct SystemWithConstraint {
  MechanicalSystem system;
  InequalityConstraint constraint;
};

// Below this |v^2| the circular quadrature switches to the straight-line form.
inline constexpr double kStraightLineThreshold = 1e-12;

namespace detail {

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw ConfigError(std::string("parameter ") + name + " must be positive");
  }
}

inline MechanicalSystem diagonal_mechanical_system(std::string name, FrameField frame,
                                                   Vector diag) {
  const int n = static_cast<int>(diag.size());
  MechanicalSystem sys;
  sys.name = std::move(name);
  sys.frame = std::move(frame);
  sys.mass_matrix = [diag](const Vector&) -> Matrix { return diag.asDiagonal(); };
  sys.potential = [](const Vector&) { return 0.0; };
  sys.mass_matrix_jacobian = [n](const Vector&) {
    return MatrixJacobian(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  };
  sys.potential_gradient = [n](const Vector&) -> Vector { return Vector::Zero(n); };
  return sys;
}

}  // namespace detail

/// Frame u1 = cos(th) dx + sin(th) dy, u2 = dth, u3 = -sin(th) dx + cos(th) dy.
inline FrameField sleigh_frame() {
  FrameField f;
  f.dim = 3;
  f.rank = 2;
  f.psi = [](const Vector& q) -> Matrix {
    const double c = std::cos(q(2));
    const double s = std::sin(q(2));
    Matrix psi(3, 3);
    psi << c, 0.0, -s,
           s, 0.0, c,
           0.0, 1.0, 0.0;
    return psi;
  };
  f.psi_jacobian = [](const Vector& q) {
    const double c = std::cos(q(2));
    const double s = std::sin(q(2));
    MatrixJacobian d(3, Matrix::Zero(3, 3));
    d[2] << -s, 0.0, -c,
             c, 0.0, -s,
             0.0, 0.0, 0.0;
    return d;
  };
  return f;
}

inline SystemWithConstraint make_sleigh(const SleighParams& p) {
  detail::require_positive(p.m, "m");
  detail::require_positive(p.I, "I");
  detail::require_positive(p.r, "r");
  SystemWithConstraint out{
      detail::diagonal_mechanical_system("chaplygin-sleigh", sleigh_frame(),
                                         Eigen::Vector3d(p.m, p.m, p.I)),
      {}};
  const double r2 = p.r * p.r;
  out.constraint.g = [r2](const Vector& q) { return q(0) * q(0) + q(1) * q(1) - r2; };
  out.constraint.grad_g = [](const Vector& q) -> Vector {
    return Eigen::Vector3d(2.0 * q(0), 2.0 * q(1), 0.0);
  };
  return out;
}

/// Frame u1 = dth + R cos(phi) dx + R sin(phi) dy, u2 = dphi,
/// u3 = dx - R cos(phi) dth, u4 = dy - R sin(phi) dth.
inline FrameField disk_frame(double R) {
  FrameField f;
  f.dim = 4;
  f.rank = 2;
  f.psi = [R](const Vector& q) -> Matrix {
    const double c = std::cos(q(3));
    const double s = std::sin(q(3));
    Matrix psi(4, 4);
    psi << R * c, 0.0, 1.0, 0.0,
           R * s, 0.0, 0.0, 1.0,
           1.0, 0.0, -R * c, -R * s,
           0.0, 1.0, 0.0, 0.0;
    return psi;
  };
  f.psi_jacobian = [R](const Vector& q) {
    const double c = std::cos(q(3));
    const double s = std::sin(q(3));
    MatrixJacobian d(4, Matrix::Zero(4, 4));
    d[3] << -R * s, 0.0, 0.0, 0.0,
             R * c, 0.0, 0.0, 0.0,
             0.0, 0.0, R * s, -R * c,
             0.0, 0.0, 0.0, 0.0;
    return d;
  };
  return f;
}

inline SystemWithConstraint make_disk(const DiskParams& p) {
  detail::require_positive(p.m, "m");
  detail::require_positive(p.I, "I");
  detail::require_positive(p.J, "J");
  detail::require_positive(p.R, "R");
  SystemWithConstraint out{
      detail::diagonal_mechanical_system("vertical-disk", disk_frame(p.R),
                                         Eigen::Vector4d(p.m, p.m, p.I, p.J)),
      {}};
  const double R = p.R;
  const double d = p.d;
  out.constraint.g = [R, d](const Vector& q) { return q(1) + R * std::sin(q(3)) - d; };
  out.constraint.grad_g = [R](const Vector& q) -> Vector {
    return Eigen::Vector4d(0.0, 1.0, 0.0, R * std::cos(q(3)));
  };
  return out;
}

/// Closed-form flow with constant (v1, v2): the blade point moves on a circle
/// of radius v1/v2 (or a straight line when v2 = 0).
inline State exact_flow_sleigh(const SleighParams&, const State& s, double dt) {
  if (dt < 0.0) throw Error("exact flow requires dt >= 0");
  const double v1 = s.v(0);
  const double v2 = s.v(1);
  const double th0 = s.q(2);
  const double th1 = th0 + v2 * dt;
  State out = s;
  out.t = s.t + dt;
  out.q(2) = th1;
  if (std::abs(v2) < kStraightLineThreshold) {
    out.q(0) += v1 * std::cos(th0) * dt;
    out.q(1) += v1 * std::sin(th0) * dt;
  } else {
    const double radius = v1 / v2;
    out.q(0) += radius * (std::sin(th1) - std::sin(th0));
    out.q(1) -= radius * (std::cos(th1) - std::cos(th0));
  }
  return out;
}

/// Closed-form flow of the rolling disk: contact point on a circle of radius
/// R v1 / v2, theta and phi advance linearly.
inline State exact_flow_disk(const DiskParams& p, const State& s, double dt) {
  if (dt < 0.0) throw Error("exact flow requires dt >= 0");
  const double v1 = s.v(0);
  const double v2 = s.v(1);
  const double phi0 = s.q(3);
  const double phi1 = phi0 + v2 * dt;
  State out = s;
  out.t = s.t + dt;
  out.q(2) += v1 * dt;
  out.q(3) = phi1;
  if (std::abs(v2) < kStraightLineThreshold) {
    out.q(0) += p.R * v1 * std::cos(phi0) * dt;
    out.q(1) += p.R * v1 * std::sin(phi0) * dt;
  } else {
    const double radius = p.R * v1 / v2;
    out.q(0) += radius * (std::sin(phi1) - std::sin(phi0));
    out.q(1) -= radius * (std::cos(phi1) - std::cos(phi0));
  }
  return out;
}

/// Polyline in the (x, y) plane used to draw the boundary in plots.
using Polyline = std::vector<std::pair<double, double>>;

/// A named system with its constraint, closed-form flow and reference setup.
struct BuiltinSystem {
  std::string name;
  std::string description;
  std::map<std::string, double> params;
  MechanicalSystem system;
  InequalityConstraint constraint;
  StateFlow exact_flow;
  Vector default_q0;
  Vector default_v0;
  double default_h = 0.1;
  double default_t_max = 1.0;
  /// Boundary trace for plotting, given the plot's x/y extent.
  std::function<Polyline(double xmin, double xmax, double ymin, double ymax)> boundary;
};

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"chaplygin-sleigh", "vertical-disk"};
  return names;
}

/// Parameter names and defaults accepted by a built-in system.
inline std::map<std::string, double> builtin_parameters(const std::string& name) {
  if (name == "chaplygin-sleigh") {
    const SleighParams p;
    return {{"m", p.m}, {"I", p.I}, {"r", p.r}};
  }
  if (name == "vertical-disk") {
    const DiskParams p;
    return {{"m", p.m}, {"I", p.I}, {"J", p.J}, {"R", p.R}, {"d", p.d}};
  }
  throw ConfigError("unknown system '" + name + "'");
}

inline BuiltinSystem make_builtin(const std::string& name,
                                  const std::map<std::string, double>& overrides = {}) {
  std::map<std::string, double> params = builtin_parameters(name);
  for (const auto& [key, value] : overrides) {
    auto it = params.find(key);
    if (it == params.end()) {
      throw ConfigError("unknown parameter '" + key + "' for system '" + name + "'");
    }
    it->second = value;
  }

  BuiltinSystem out;
  out.name = name;
  out.params = params;
  if (name == "chaplygin-sleigh") {
    const SleighParams p{params.at("m"), params.at("I"), params.at("r")};
    auto [sys, constraint] = make_sleigh(p);
    out.description = "knife-edge sleigh inside the disk x^2 + y^2 <= r^2";
    out.system = std::move(sys);
    out.constraint = std::move(constraint);
    out.exact_flow = [p](const State& s, double dt) { return exact_flow_sleigh(p, s, dt); };
    out.default_q0 = Eigen::Vector3d(0.0, 0.0, std::numbers::pi / 2.0);
    out.default_v0 = Eigen::Vector2d(0.1, 0.05);
    out.default_h = 0.1;
    out.default_t_max = 400.0;
    out.boundary = [r = p.r](double, double, double, double) {
      Polyline circle;
      constexpr int kSegments = 256;
      for (int i = 0; i <= kSegments; ++i) {
        const double a = 2.0 * std::numbers::pi * i / kSegments;
        circle.emplace_back(r * std::cos(a), r * std::sin(a));
      }
      return circle;
    };
  } else {
    const DiskParams p{params.at("m"), params.at("I"), params.at("J"), params.at("R"),
                       params.at("d")};
    auto [sys, constraint] = make_disk(p);
    out.description = "vertical rolling disk facing the wall y + R sin(phi) <= d";
    out.system = std::move(sys);
    out.constraint = std::move(constraint);
    out.exact_flow = [p](const State& s, double dt) { return exact_flow_disk(p, s, dt); };
    out.default_q0 = Eigen::Vector4d(0.0, 0.0, 0.0, std::numbers::pi / 2.0);
    out.default_v0 = Eigen::Vector2d(1.0, 0.0);
    out.default_h = 0.1;
    out.default_t_max = 18.0;
    // Wall position for a disk standing perpendicular to it (phi = pi/2).
    out.boundary = [wall = p.d - p.R](double xmin, double xmax, double, double) {
      return Polyline{{xmin, wall}, {xmax, wall}};
    };
  }
  return out;
}

}  // namespace hamel
