#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamel/errors.hpp"

namespace hamel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Partial derivatives of a matrix field, one n x n slice per coordinate:
/// element [l](i, j) holds d(entry i,j)/dq^l.
using MatrixJacobian = std::vector<Matrix>;

inline constexpr double kDefaultFdStep = 1e-6;
inline constexpr double kSingularDetThreshold = 1e-12;

/**
 * Local frame {u_1, ..., u_n} on a single chart of R^n.
 *
 * psi(q) returns the n x n component matrix whose column j holds the
 * coordinates of u_j(q). The first `rank` columns span the constraint
 * distribution; the remaining ones complete the basis. When psi_jacobian is
 * empty the derivatives are taken by central differences with `fd_step`.
 */
struct FrameField {
  int dim = 0;
  int rank = 0;
  std::function<Matrix(const Vector&)> psi;
  std::function<MatrixJacobian(const Vector&)> psi_jacobian;
  double fd_step = kDefaultFdStep;

  bool has_analytic_jacobian() const { return static_cast<bool>(psi_jacobian); }
};

/// Coordinate frame psi = I with the given distribution rank.
inline FrameField coordinate_frame(int dim, int rank) {
  FrameField f;
  f.dim = dim;
  f.rank = rank;
  f.psi = [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); };
  f.psi_jacobian = [dim](const Vector&) {
    return MatrixJacobian(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim));
  };
  return f;
}

/// Bracket coefficients c^m_ij at one point: [u_i, u_j] = c^m_ij u_m.
/// Indices are zero-based.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n)
      : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }

  double operator()(int m, int i, int j) const { return data_[index(m, i, j)]; }
  double& operator()(int m, int i, int j) { return data_[index(m, i, j)]; }

  /// Coefficient vector of [u_i, u_j] in the frame basis.
  Vector bracket(int i, int j) const {
    Vector out(n_);
    for (int m = 0; m < n_; ++m) out(m) = (*this)(m, i, j);
    return out;
  }

 private:
  std::size_t index(int m, int i, int j) const {
    return (static_cast<std::size_t>(m) * n_ + i) * n_ + j;
  }

  int n_ = 0;
  std::vector<double> data_;
};

namespace detail {

inline void check_dim(const FrameField& frame, const Vector& q) {
  if (q.size() != frame.dim) {
    throw Error("configuration has " + std::to_string(q.size()) +
                " components, frame expects " + std::to_string(frame.dim));
  }
}

inline Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& psi) {
  Eigen::PartialPivLU<Matrix> lu(psi);
  const double det = lu.determinant();
  if (!(std::abs(det) > kSingularDetThreshold)) {
    throw SingularFrameError("frame matrix is singular (|det| = " +
                             std::to_string(std::abs(det)) + ")");
  }
  return lu;
}

/// Central-difference Jacobian of a matrix-valued field.
template <typename Field>
MatrixJacobian fd_matrix_jacobian(const Field& field, const Vector& q, double step) {
  MatrixJacobian out;
  out.reserve(static_cast<std::size_t>(q.size()));
  Vector qp = q;
  Vector qm = q;
  for (Eigen::Index l = 0; l < q.size(); ++l) {
    qp(l) = q(l) + step;
    qm(l) = q(l) - step;
    out.emplace_back((field(qp) - field(qm)) / (2.0 * step));
    qp(l) = q(l);
    qm(l) = q(l);
  }
  return out;
}

/// Central-difference gradient of a scalar field.
template <typename Scalar>
Vector fd_gradient(const Scalar& f, const Vector& q, double step) {
  Vector grad(q.size());
  Vector qp = q;
  Vector qm = q;
  for (Eigen::Index l = 0; l < q.size(); ++l) {
    qp(l) = q(l) + step;
    qm(l) = q(l) - step;
    grad(l) = (f(qp) - f(qm)) / (2.0 * step);
    qp(l) = q(l);
    qm(l) = q(l);
  }
  return grad;
}

/// c^m_ij = (psi^-1)^m_k (d psi^k_j/dq^l psi^l_i - d psi^k_i/dq^l psi^l_j)
inline StructureConstants structure_constants_from(const Matrix& psi,
                                                   const Matrix& psi_inv,
                                                   const MatrixJacobian& dpsi) {
  const int n = static_cast<int>(psi.rows());
  // directional[i] column j = (D u_j) u_i
  std::vector<Matrix> directional(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) directional[i] += dpsi[l] * psi(l, i);
  }
  StructureConstants c(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vector bracket = directional[i].col(j) - directional[j].col(i);
      const Vector coeffs = psi_inv * bracket;
      for (int m = 0; m < n; ++m) c(m, i, j) = coeffs(m);
    }
  }
  return c;
}

}  // namespace detail

/// psi(q); throws SingularFrameError when |det psi| <= 1e-12.
inline Matrix eval_frame(const FrameField& frame, const Vector& q) {
  detail::check_dim(frame, q);
  Matrix psi = frame.psi(q);
  detail::checked_lu(psi);
  return psi;
}

inline Matrix frame_inverse(const FrameField& frame, const Vector& q) {
  detail::check_dim(frame, q);
  return detail::checked_lu(frame.psi(q)).inverse();
}

/// Analytic Jacobian of psi when provided, central differences otherwise.
inline MatrixJacobian frame_jacobian(const FrameField& frame, const Vector& q) {
  detail::check_dim(frame, q);
  if (frame.has_analytic_jacobian()) return frame.psi_jacobian(q);
  return detail::fd_matrix_jacobian(frame.psi, q, frame.fd_step);
}

inline StructureConstants structure_constants(const FrameField& frame, const Vector& q) {
  const Matrix psi = eval_frame(frame, q);
  const Matrix psi_inv = detail::checked_lu(psi).inverse();
  return detail::structure_constants_from(psi, psi_inv, frame_jacobian(frame, q));
}

/// u_j[f] = psi^i_j df/dq^i. `gradient`, when given, replaces the central
/// differences of f.
inline double directional_derivative(
    const FrameField& frame, const std::function<double(const Vector&)>& f,
    const Vector& q, int j,
    const std::function<Vector(const Vector&)>& gradient = {}) {
  detail::check_dim(frame, q);
  if (j < 0 || j >= frame.dim) throw Error("frame index out of range");
  const Vector grad = gradient ? gradient(q) : detail::fd_gradient(f, q, frame.fd_step);
  return frame.psi(q).col(j).dot(grad);
}

}  // namespace hamel
