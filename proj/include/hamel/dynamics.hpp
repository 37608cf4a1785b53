#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hamel/impact.hpp"

namespace hamel {

struct StateDerivative {
  Vector qdot;  // n components
  Vector vdot;  // k components
};

/**
 * Constrained Hamel equations
 *   d/dt dl/dv^i = c^m_ji v^j dl/dv^m + u_i[l],   qdot = v^i u_i,   v^a = 0,
 * solved for vdot. The left side is expanded as M_D vdot + (dM_psi/dt v)_i,
 * so q-dependent reduced mass matrices are handled. With k = n this is the
 * unconstrained Hamel system.
 */
inline StateDerivative hamel_rhs(const MechanicalSystem& sys, const Vector& q, const Vector& v) {
  const int n = sys.dim();
  const int k = sys.rank();
  const Vector v_full = pad_velocity(sys, v);

  const Matrix psi = eval_frame(sys.frame, q);
  const Matrix psi_inv = detail::checked_lu(psi).inverse();
  const MatrixJacobian dpsi = frame_jacobian(sys.frame, q);
  const StructureConstants c = detail::structure_constants_from(psi, psi_inv, dpsi);

  const Matrix mass_psi = psi.transpose() * sys.mass_matrix(q) * psi;
  const MatrixJacobian dmass_psi = reduced_mass_jacobian(sys, q, psi, dpsi);
  const Vector momentum = mass_psi * v_full;
  const Vector qdot = psi * v_full;

  const Vector dl_dq = lagrangian_q_gradient(sys, q, v_full, dmass_psi);
  Matrix mass_psi_rate = Matrix::Zero(n, n);
  for (int l = 0; l < n; ++l) mass_psi_rate += dmass_psi[l] * qdot(l);
  const Vector transport = mass_psi_rate * v_full;

  Vector rhs(k);
  for (int i = 0; i < k; ++i) {
    double acc = psi.col(i).dot(dl_dq) - transport(i);
    for (int j = 0; j < k; ++j) {
      if (v(j) == 0.0) continue;
      for (int m = 0; m < n; ++m) acc += c(m, j, i) * v(j) * momentum(m);
    }
    rhs(i) = acc;
  }

  const Matrix mass_d = mass_psi.topLeftCorner(k, k);
  const Eigen::LDLT<Matrix> ldlt(mass_d);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(std::abs(ldlt.vectorD().minCoeff()) > 1e-14)) {
    throw SingularSystemError("constrained mass matrix M_D is singular");
  }
  return {qdot, ldlt.solve(rhs)};
}

/// Classical four-stage Runge-Kutta step of the Hamel system.
inline State rk4_step(const MechanicalSystem& sys, const State& s, double h) {
  if (!(h > 0.0)) throw Error("step size must be positive");
  const auto k1 = hamel_rhs(sys, s.q, s.v);
  const auto k2 = hamel_rhs(sys, s.q + 0.5 * h * k1.qdot, s.v + 0.5 * h * k1.vdot);
  const auto k3 = hamel_rhs(sys, s.q + 0.5 * h * k2.qdot, s.v + 0.5 * h * k2.vdot);
  const auto k4 = hamel_rhs(sys, s.q + h * k3.qdot, s.v + h * k3.vdot);
  State out;
  out.t = s.t + h;
  out.q = s.q + (h / 6.0) * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
  out.v = s.v + (h / 6.0) * (k1.vdot + 2.0 * k2.vdot + 2.0 * k3.vdot + k4.vdot);
  return out;
}

// Lagrange-d'Alembert equations in generalized coordinates. This path
// deliberately avoids the frame Jacobian, structure constants and reduced
// mass matrix; every derivative is a central difference of the raw M, V and
// psi^-1 fields so it can serve as an independent cross-check of hamel_rhs.

/// Constraint one-forms mu^a: the last n-k rows of psi^-1 (the dual
/// covectors spanning the annihilator of the distribution).
inline Matrix constraint_forms(const MechanicalSystem& sys, const Vector& q) {
  const int n = sys.dim();
  const int k = sys.rank();
  return frame_inverse(sys.frame, q).bottomRows(n - k);
}

/// qddot = M^-1 (F + mu^T lambda), lambda chosen so d/dt (mu qdot) = 0.
inline Vector lda_rhs(const MechanicalSystem& sys, const Vector& q, const Vector& qdot) {
  const int n = sys.dim();
  const int k = sys.rank();
  const double step = sys.fd_step;

  const Matrix mass = sys.mass_matrix(q);
  const MatrixJacobian dmass = detail::fd_matrix_jacobian(sys.mass_matrix, q, step);
  Vector force = -detail::fd_gradient(sys.potential, q, step);
  Matrix mass_rate = Matrix::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    force(l) += 0.5 * qdot.dot(dmass[l] * qdot);
    mass_rate += dmass[l] * qdot(l);
  }
  force -= mass_rate * qdot;

  const Eigen::LDLT<Matrix> mass_ldlt(mass);
  const Vector free_accel = mass_ldlt.solve(force);
  if (k == n) return free_accel;

  const Matrix mu = constraint_forms(sys, q);
  const Matrix mu_rate = (constraint_forms(sys, q + step * qdot) -
                          constraint_forms(sys, q - step * qdot)) / (2.0 * step);
  const Matrix minv_mut = mass_ldlt.solve(mu.transpose());
  const Matrix schur = mu * minv_mut;
  const Eigen::FullPivLU<Matrix> schur_lu(schur);
  if (!schur_lu.isInvertible()) {
    throw SingularSystemError("constraint multiplier system mu M^-1 mu^T is singular");
  }
  const Vector lambda = schur_lu.solve(-(mu_rate * qdot) - mu * free_accel);
  return free_accel + minv_mut * lambda;
}

struct CoordinateState {
  double t = 0.0;
  Vector q;
  Vector qdot;
};

inline CoordinateState lda_rk4_step(const MechanicalSystem& sys, const CoordinateState& s,
                                    double h) {
  const Vector a1 = lda_rhs(sys, s.q, s.qdot);
  const Vector q2 = s.q + 0.5 * h * s.qdot;
  const Vector w2 = s.qdot + 0.5 * h * a1;
  const Vector a2 = lda_rhs(sys, q2, w2);
  const Vector q3 = s.q + 0.5 * h * w2;
  const Vector w3 = s.qdot + 0.5 * h * a2;
  const Vector a3 = lda_rhs(sys, q3, w3);
  const Vector q4 = s.q + h * w3;
  const Vector w4 = s.qdot + h * a3;
  const Vector a4 = lda_rhs(sys, q4, w4);
  CoordinateState out;
  out.t = s.t + h;
  out.q = s.q + (h / 6.0) * (s.qdot + 2.0 * w2 + 2.0 * w3 + w4);
  out.qdot = s.qdot + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  return out;
}

/// Number of whole steps of size h that fit in [0, t_max].
inline long step_count(double h, double t_max) {
  if (!(h > 0.0)) throw Error("step size must be positive");
  if (t_max < 0.0) return 0;
  return static_cast<long>(std::floor(t_max / h + 1e-9));
}

enum class IntegrationMode { rk4, exact };

inline std::string to_string(IntegrationMode mode) {
  return mode == IntegrationMode::rk4 ? "rk4" : "exact";
}

inline IntegrationMode parse_mode(const std::string& text) {
  if (text == "rk4") return IntegrationMode::rk4;
  if (text == "exact") return IntegrationMode::exact;
  throw ConfigError("unknown integration mode '" + text + "' (expected rk4 or exact)");
}

/// Nominal-grid samples (strictly increasing times) plus every impact.
struct Trajectory {
  std::vector<State> samples;
  std::vector<ImpactEvent> impacts;
  double step = 0.0;
};

struct SimulationOptions {
  IntegrationMode mode = IntegrationMode::rk4;
  StateFlow exact_flow;  // required for IntegrationMode::exact
  int max_impacts_per_step = 8;
  ImpactTolerances tolerances;
};

/**
 * Fixed-step integration with post-step event checks. A step that leaves C
 * is bisected back to the boundary, the jump is applied there, and the
 * remainder of the nominal step is integrated from the impact time, so
 * samples stay on the grid t0 + i h.
 */
inline Trajectory simulate(const MechanicalSystem& sys, const InequalityConstraint& constraint,
                           const State& init, double h, double t_max,
                           const SimulationOptions& options = {}) {
  if (init.q.size() != sys.dim() || init.v.size() != sys.rank()) {
    throw Error("initial state dimensions do not match system '" + sys.name + "'");
  }
  const ImpactTolerances& tol = options.tolerances;
  if (constraint(init.q) > tol.g) {
    throw Error("initial configuration violates the inequality constraint");
  }

  StateFlow flow;
  if (options.mode == IntegrationMode::exact) {
    if (!options.exact_flow) {
      throw Error("exact mode is not available for system '" + sys.name + "'");
    }
    flow = options.exact_flow;
  } else {
    flow = [&sys](const State& s, double dt) { return rk4_step(sys, s, dt); };
  }

  Trajectory traj;
  traj.step = h;
  const long steps = step_count(h, t_max);
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
  traj.samples.push_back(init);

  State state = init;
  for (long i = 1; i <= steps; ++i) {
    const double t_target = init.t + static_cast<double>(i) * h;
    int impacts_here = 0;
    while (t_target - state.t > 0.0) {
      State next = flow(state, t_target - state.t);
      next.t = t_target;
      const double g_next = constraint(next.q);

      State contact;
      if (g_next > tol.g) {
        contact = locate_crossing(constraint, sys, flow, state, next, tol);
      } else if (std::abs(g_next) <= tol.g && outward_rate(sys, constraint, next) > tol.grazing) {
        contact = std::move(next);
      } else {
        state = std::move(next);
        break;
      }

      if (++impacts_here > options.max_impacts_per_step) {
        throw ZenoError("more than " + std::to_string(options.max_impacts_per_step) +
                        " impacts within the step ending at t = " + std::to_string(t_target));
      }
      const JumpSolution jump = jump_solve(sys, constraint, contact.q, contact.v, tol);
      ImpactEvent event;
      event.t_impact = contact.t;
      event.q_impact = contact.q;
      event.v_minus = contact.v;
      event.v_plus = jump.v_plus;
      event.lambda0 = jump.lambda0;
      event.lambda_a = jump.lambda_a;
      event.next_sample = traj.samples.size();
      traj.impacts.push_back(event);
      state = State{contact.t, contact.q, jump.v_plus};
    }
    state.t = t_target;
    traj.samples.push_back(state);
  }
  return traj;
}

}  // namespace hamel
