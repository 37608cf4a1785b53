#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "hamel/mechsys.hpp"

namespace hamel {

/// Unilateral constraint g(q) <= 0. Its boundary g = 0 must be a regular
/// hypersurface (dg != 0 there).
struct InequalityConstraint {
  std::function<double(const Vector&)> g;
  std::function<Vector(const Vector&)> grad_g;
  double fd_step = kDefaultFdStep;

  double operator()(const Vector& q) const { return g(q); }

  Vector gradient(const Vector& q) const {
    if (grad_g) return grad_g(q);
    return detail::fd_gradient(g, q, fd_step);
  }
};

struct ImpactTolerances {
  double g = 1e-10;        // boundary residual accepted as "on the boundary"
  double t = 1e-12;        // smallest bracket width worth bisecting
  double grazing = 1e-9;   // |G . v| below this is tangential contact
  int max_bisections = 100;
};

struct ImpactEvent {
  double t_impact = 0.0;
  Vector q_impact;
  Vector v_minus;
  Vector v_plus;
  double lambda0 = 0.0;
  Vector lambda_a;
  std::size_t next_sample = 0;  // index of the first grid sample after the jump
};

struct JumpSolution {
  Vector v_plus;
  double lambda0 = 0.0;
  Vector lambda_a;
};

/// Advances a state by dt along the between-impact dynamics.
using StateFlow = std::function<State(const State&, double)>;

/// G_b = dg(u_b), b < k: the boundary normal paired with the distribution.
inline Vector constrained_normal(const MechanicalSystem& sys,
                                 const InequalityConstraint& constraint, const Vector& q) {
  const Matrix psi = eval_frame(sys.frame, q);
  return (psi.leftCols(sys.rank()).transpose() * constraint.gradient(q)).eval();
}

/// Rate dg/dt = G . v of the constraint function along the motion.
inline double outward_rate(const MechanicalSystem& sys, const InequalityConstraint& constraint,
                           const State& s) {
  return constrained_normal(sys, constraint, s.q).dot(s.v);
}

/**
 * Elastic jump on the boundary for a nonholonomic system.
 *
 * Pairing the momentum jump p+ - p- = lambda^a u*_a + lambda0 dg with the
 * distribution directions gives M_D (v+ - v-) = lambda0 G; together with
 * energy conservation the admissible nontrivial root is
 *   lambda0 = -2 (G . v-) / (G^T M_D^-1 G),   v+ = v- + lambda0 M_D^-1 G.
 * The annihilator multipliers are read off the remaining frame components.
 */
inline JumpSolution jump_solve(const MechanicalSystem& sys,
                               const InequalityConstraint& constraint, const Vector& q,
                               const Vector& v_minus, const ImpactTolerances& tol = {}) {
  const int n = sys.dim();
  const int k = sys.rank();
  const Matrix psi = eval_frame(sys.frame, q);
  const Vector dg = constraint.gradient(q);
  const Vector normal_frame = psi.transpose() * dg;  // dg(u_j), all j
  const Vector normal = normal_frame.head(k);
  const Matrix mass_psi = psi.transpose() * sys.mass_matrix(q) * psi;
  const Matrix mass_d = mass_psi.topLeftCorner(k, k);

  const double rate = normal.dot(v_minus);
  if (rate < -tol.grazing) {
    throw JumpError("impact requested while separating from the boundary (G.v = " +
                    std::to_string(rate) + ")");
  }

  JumpSolution out;
  out.lambda_a = Vector::Zero(n - k);
  if (std::abs(rate) <= tol.grazing) {
    out.v_plus = v_minus;
    return out;
  }

  const Eigen::LDLT<Matrix> ldlt(mass_d);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularSystemError("constrained mass matrix is not positive definite");
  }
  const Vector mass_inv_normal = ldlt.solve(normal);
  const double metric = normal.dot(mass_inv_normal);
  if (!(metric > 1e-12)) {
    throw JumpError("boundary normal is degenerate on the distribution (G^T M_D^-1 G = " +
                    std::to_string(metric) + ")");
  }

  out.lambda0 = -2.0 * rate / metric;
  out.v_plus = v_minus + out.lambda0 * mass_inv_normal;

  const Vector dv_full = pad_velocity(sys, out.v_plus - v_minus);
  const Vector dp = mass_psi * dv_full;
  out.lambda_a = dp.tail(n - k) - out.lambda0 * normal_frame.tail(n - k);
  return out;
}

/**
 * Bisects the step duration of `flow` restarted from s_before until the
 * state sits on the boundary (|g| <= tol.g, approached from inside).
 * s_after must be flow(s_before, s_after.t - s_before.t).
 */
inline State locate_crossing(const InequalityConstraint& constraint,
                             const MechanicalSystem& sys, const StateFlow& flow,
                             const State& s_before, const State& s_after,
                             const ImpactTolerances& tol = {}) {
  const double g_before = constraint(s_before.q);
  const double g_after = constraint(s_after.q);
  if (std::abs(g_before) <= tol.g && outward_rate(sys, constraint, s_before) > tol.grazing) {
    return s_before;
  }
  if (g_before > tol.g || !(g_after > 0.0)) {
    throw EventLocationError("constraint values do not bracket the boundary (g_before = " +
                             std::to_string(g_before) + ", g_after = " +
                             std::to_string(g_after) + ")");
  }

  double lo = 0.0;
  double hi = s_after.t - s_before.t;
  State lo_state = s_before;
  State hi_state = s_after;
  for (int iter = 0; iter < tol.max_bisections; ++iter) {
    const double mid = 0.5 * (lo + hi);
    State mid_state = flow(s_before, mid);
    const double g_mid = constraint(mid_state.q);
    if (g_mid <= 0.0) {
      lo = mid;
      lo_state = std::move(mid_state);
      if (-g_mid <= tol.g) return lo_state;
    } else {
      hi = mid;
      hi_state = std::move(mid_state);
      if (hi - lo <= tol.t && g_mid <= tol.g) return hi_state;
    }
  }
  throw EventLocationError("boundary crossing did not converge after " +
                           std::to_string(tol.max_bisections) + " bisections");
}

}  // namespace hamel
