#pragma once

#include <functional>
#include <string>
#include <utility>

#include "hamel/frame.hpp"

namespace hamel {

/**
 * Regular mechanical system L = 1/2 qdot^T M(q) qdot - V(q) with an adapted
 * frame whose first `frame.rank` fields span the constraint distribution.
 *
 * Optional analytic derivatives of M and V replace central differences. The
 * reduced Lagrangian l(q, v) = L(q, psi(q) v) is never stored; everything is
 * evaluated from the quadratic form M_psi = psi^T M psi.
 */
struct MechanicalSystem {
  std::string name;
  FrameField frame;
  std::function<Matrix(const Vector&)> mass_matrix;
  std::function<double(const Vector&)> potential;
  std::function<MatrixJacobian(const Vector&)> mass_matrix_jacobian;
  std::function<Vector(const Vector&)> potential_gradient;
  double fd_step = kDefaultFdStep;

  int dim() const { return frame.dim; }
  int rank() const { return frame.rank; }
};

/// Time, configuration and the k constrained quasivelocities. The
/// annihilator components v^a (a > k) are zero and are not stored.
struct State {
  double t = 0.0;
  Vector q;
  Vector v;
};

/// Zero-pads constrained quasivelocities to a full n-vector.
inline Vector pad_velocity(const MechanicalSystem& sys, const Vector& v) {
  if (v.size() != sys.rank()) {
    throw Error("quasivelocity has " + std::to_string(v.size()) +
                " components, system rank is " + std::to_string(sys.rank()));
  }
  Vector full = Vector::Zero(sys.dim());
  full.head(sys.rank()) = v;
  return full;
}

inline Matrix reduced_mass_matrix(const MechanicalSystem& sys, const Vector& q) {
  const Matrix psi = eval_frame(sys.frame, q);
  return psi.transpose() * sys.mass_matrix(q) * psi;
}

/// Leading k x k block of M_psi (kinetic metric restricted to the distribution).
inline Matrix constrained_mass_matrix(const MechanicalSystem& sys, const Vector& q) {
  return reduced_mass_matrix(sys, q).topLeftCorner(sys.rank(), sys.rank());
}

inline MatrixJacobian mass_matrix_jacobian(const MechanicalSystem& sys, const Vector& q) {
  if (sys.mass_matrix_jacobian) return sys.mass_matrix_jacobian(q);
  return detail::fd_matrix_jacobian(sys.mass_matrix, q, sys.fd_step);
}

inline Vector potential_gradient(const MechanicalSystem& sys, const Vector& q) {
  if (sys.potential_gradient) return sys.potential_gradient(q);
  return detail::fd_gradient(sys.potential, q, sys.fd_step);
}

/// d M_psi / dq^l for every l, from the product rule on psi^T M psi.
inline MatrixJacobian reduced_mass_jacobian(const MechanicalSystem& sys, const Vector& q,
                                            const Matrix& psi, const MatrixJacobian& dpsi) {
  const Matrix mass = sys.mass_matrix(q);
  const MatrixJacobian dmass = mass_matrix_jacobian(sys, q);
  MatrixJacobian out;
  out.reserve(dpsi.size());
  for (std::size_t l = 0; l < dpsi.size(); ++l) {
    const Matrix cross = dpsi[l].transpose() * mass * psi;
    out.emplace_back(cross + cross.transpose() + psi.transpose() * dmass[l] * psi);
  }
  return out;
}

/// dl/dq^l with v_full held fixed.
inline Vector lagrangian_q_gradient(const MechanicalSystem& sys, const Vector& q,
                                    const Vector& v_full, const MatrixJacobian& dmass_psi) {
  Vector grad = -potential_gradient(sys, q);
  for (std::size_t l = 0; l < dmass_psi.size(); ++l) {
    grad(static_cast<Eigen::Index>(l)) += 0.5 * v_full.dot(dmass_psi[l] * v_full);
  }
  return grad;
}

/// l(q, v) = 1/2 v^T M_psi(q) v - V(q), with v the full n-vector.
inline double reduced_lagrangian(const MechanicalSystem& sys, const Vector& q,
                                 const Vector& v_full) {
  return 0.5 * v_full.dot(reduced_mass_matrix(sys, q) * v_full) - sys.potential(q);
}

/// p = dl/dv = M_psi(q) v (all n components).
inline Vector quasi_momentum(const MechanicalSystem& sys, const Vector& q,
                             const Vector& v_full) {
  return reduced_mass_matrix(sys, q) * v_full;
}

/// E = p . v - l.
inline double energy(const MechanicalSystem& sys, const Vector& q, const Vector& v_full) {
  return quasi_momentum(sys, q, v_full).dot(v_full) - reduced_lagrangian(sys, q, v_full);
}

inline double energy(const MechanicalSystem& sys, const State& s) {
  return energy(sys, s.q, pad_velocity(sys, s.v));
}

/// u_j[l](q, v) = psi^i_j dl/dq^i.
inline double frame_force(const MechanicalSystem& sys, const Vector& q, const Vector& v_full,
                          int j) {
  if (j < 0 || j >= sys.dim()) throw Error("frame index out of range");
  const Matrix psi = eval_frame(sys.frame, q);
  const MatrixJacobian dmass_psi = reduced_mass_jacobian(sys, q, psi, frame_jacobian(sys.frame, q));
  return psi.col(j).dot(lagrangian_q_gradient(sys, q, v_full, dmass_psi));
}

}  // namespace hamel
