#pragma once

// Independent reference computations used to cross-check the simulator.
// None of these routines is called on the simulation path.

#include <cmath>
#include <random>
#include <utility>

#include "hamel/frame.hpp"
#include "hamel/errors.hpp"

namespace hamel::oracle {

/// Jacobi-Lie bracket [u_i, u_j] = (D u_j) u_i - (D u_i) u_j from directional
/// central differences of the frame columns.
inline Vector lie_bracket(const FrameField& frame, const Vector& q, int i, int j,
                          double step = 1e-6) {
  const Matrix psi = frame.psi(q);
  const Vector ui = psi.col(i);
  const Vector uj = psi.col(j);
  const Vector duj_ui = (frame.psi(q + step * ui).col(j) - frame.psi(q - step * ui).col(j)) /
                        (2.0 * step);
  const Vector dui_uj = (frame.psi(q + step * uj).col(i) - frame.psi(q - step * uj).col(i)) /
                        (2.0 * step);
  return duj_ui - dui_uj;
}

struct JumpRoot {
  Vector v_plus;
  double lambda0 = 0.0;
};

/**
 * Solves M_D (v+ - v-) = lambda0 G together with
 * 1/2 v+^T M_D v+ = 1/2 v-^T M_D v- for the nonzero root, without the closed
 * form: lambda0 is bracketed by a geometric scan, bisected on the energy
 * residual, and the full (k+1)-dimensional system is then polished by Newton.
 */
inline JumpRoot jump_by_root_search(const Matrix& mass_d, const Vector& normal,
                                    const Vector& v_minus) {
  const Eigen::FullPivLU<Matrix> lu(mass_d);
  const Vector p_minus = mass_d * v_minus;
  const double e_minus = 0.5 * v_minus.dot(p_minus);
  const auto v_of = [&](double lambda) -> Vector { return lu.solve(p_minus + lambda * normal); };
  const auto residual = [&](double lambda) {
    const Vector v = v_of(lambda);
    return 0.5 * v.dot(mass_d * v) - e_minus;
  };

  // Scan down from a huge multiplier: the residual is positive beyond the
  // root and clearly negative once |lambda0| drops below it. Starting near
  // zero instead would sample pure cancellation noise.
  double outer = -1e30;
  double inner = outer;
  int guard = 0;
  while (residual(inner) > 0.0) {
    outer = inner;
    inner *= 0.5;
    if (++guard > 2000) throw Error("jump oracle could not bracket the nonzero root");
  }
  for (int it = 0; it < 200 && outer != inner; ++it) {
    const double mid = 0.5 * (inner + outer);
    if (mid == inner || mid == outer) break;
    (residual(mid) <= 0.0 ? inner : outer) = mid;
  }

  const int k = static_cast<int>(v_minus.size());
  Vector z(k + 1);
  z.head(k) = v_of(outer);
  z(k) = outer;
  for (int it = 0; it < 8; ++it) {
    const Vector v = z.head(k);
    Vector f(k + 1);
    f.head(k) = mass_d * v - p_minus - z(k) * normal;
    f(k) = 0.5 * v.dot(mass_d * v) - e_minus;
    Matrix jac = Matrix::Zero(k + 1, k + 1);
    jac.topLeftCorner(k, k) = mass_d;
    jac.topRightCorner(k, 1) = -normal;
    jac.bottomLeftCorner(1, k) = (mass_d * v).transpose();
    z -= jac.fullPivLu().solve(f);
  }
  return {z.head(k), z(k)};
}

/// Symmetric positive-definite matrix with eigenvalues in [lo, hi].
template <typename Rng>
Matrix random_spd(int k, Rng& rng, double lo = 0.5, double hi = 5.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> eig(lo, hi);
  Matrix a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = normal(rng);
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix qmat = qr.householderQ();
  Vector d(k);
  for (int i = 0; i < k; ++i) d(i) = eig(rng);
  return qmat * d.asDiagonal() * qmat.transpose();
}

/**
 * Smooth, well-conditioned frame family on R^n:
 *   psi(q) = I + eps * sum_l B_l sin(q_l + phase_l)
 * with random B_l. Used for property tests of the structure constants.
 */
template <typename Rng>
FrameField random_frame(int n, int k, Rng& rng, double eps = 0.15) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Matrix> coeff;
  std::vector<double> phase;
  for (int l = 0; l < n; ++l) {
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = unit(rng);
    coeff.push_back(eps * b / n);
    phase.push_back(3.0 * unit(rng));
  }
  FrameField f;
  f.dim = n;
  f.rank = k;
  f.psi = [n, coeff, phase](const Vector& q) -> Matrix {
    Matrix psi = Matrix::Identity(n, n);
    for (int l = 0; l < n; ++l) psi += coeff[l] * std::sin(q(l) + phase[l]);
    return psi;
  };
  return f;
}

}  // namespace hamel::oracle
