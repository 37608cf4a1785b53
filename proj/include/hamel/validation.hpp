#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hamel/oracles.hpp"
#include "hamel/systems.hpp"

namespace hamel::validation {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Largest relative deviation of the energy from e_ref over samples and
/// both sides of every impact.
inline double max_energy_drift(const MechanicalSystem& sys, const Trajectory& traj, double e_ref) {
  double worst = 0.0;
  const auto check = [&](const Vector& q, const Vector& v) {
    worst = std::max(worst, std::abs(energy(sys, q, pad_velocity(sys, v)) - e_ref) / std::abs(e_ref));
  };
  for (const auto& s : traj.samples) check(s.q, s.v);
  for (const auto& ev : traj.impacts) {
    check(ev.q_impact, ev.v_minus);
    check(ev.q_impact, ev.v_plus);
  }
  return worst;
}

inline FrameField without_jacobian(FrameField f) {
  f.psi_jacobian = nullptr;
  return f;
}

/// Integrates the Hamel system (no inequality constraint) and the
/// Lagrange-d'Alembert system from the same initial condition and returns
/// the sup-norm difference of q over all steps.
inline double hamel_vs_lda(const MechanicalSystem& sys, const Vector& q0, const Vector& v0,
                           double h, double t_end) {
  State hs{0.0, q0, v0};
  CoordinateState ls{0.0, q0, eval_frame(sys.frame, q0) * pad_velocity(sys, v0)};
  const long steps = step_count(h, t_end);
  double worst = 0.0;
  for (long i = 0; i < steps; ++i) {
    hs = rk4_step(sys, hs, h);
    ls = lda_rk4_step(sys, ls, h);
    worst = std::max(worst, (hs.q - ls.q).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace detail

/// Reference run of the sleigh in the unit disk.
inline CheckResult sleigh_reference_run(IntegrationMode mode) {
  CheckResult r{mode == IntegrationMode::rk4 ? "A1" : "A1-exact",
                "sleigh reference run (" + to_string(mode) + ")", false, ""};
  const auto b = make_builtin("chaplygin-sleigh");
  SimulationOptions opts;
  opts.mode = mode;
  opts.exact_flow = b.exact_flow;
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj =
      simulate(b.system, b.constraint, State{0.0, b.default_q0, b.default_v0}, 0.1, 400.0, opts);
  const double runtime = detail::seconds_since(start);

  double worst_radius = -1.0;
  for (const auto& s : traj.samples) {
    worst_radius = std::max(worst_radius, s.q(0) * s.q(0) + s.q(1) * s.q(1));
  }
  const double drift = detail::max_energy_drift(b.system, traj, 0.00625);
  double worst_reflection = 0.0;
  for (const auto& ev : traj.impacts) {
    worst_reflection = std::max({worst_reflection, std::abs(ev.v_plus(0) + ev.v_minus(0)),
                                 std::abs(ev.v_plus(1) - ev.v_minus(1))});
  }
  const double t_first_expected =
      (std::numbers::pi - std::asin(7.0 / 8.0) - std::numbers::pi / 2.0) / 0.05;
  const double t_first = traj.impacts.empty() ? -1.0 : traj.impacts.front().t_impact;
  const double t_err = std::abs(t_first - t_first_expected);

  r.passed = !traj.impacts.empty() && worst_radius <= 1.0 + 1e-8 && drift <= 1e-9 &&
             worst_reflection <= 1e-10 && t_err <= 1e-6 && runtime < 1.0;
  std::ostringstream os;
  os << "impacts=" << traj.impacts.size() << " max(x^2+y^2)=" << worst_radius
     << " energy_drift=" << detail::sci(drift) << " reflection_err=" << detail::sci(worst_reflection)
     << " first_impact=" << t_first << " (err " << detail::sci(t_err) << ") runtime=" << runtime
     << "s";
  r.detail = os.str();
  return r;
}

/// Reference run of the rolling disk against the wall y + R sin(phi) <= 10.
inline CheckResult disk_reference_run(IntegrationMode mode) {
  CheckResult r{mode == IntegrationMode::rk4 ? "A2" : "A2-exact",
                "disk reference run (" + to_string(mode) + ")", false, ""};
  const auto b = make_builtin("vertical-disk");
  SimulationOptions opts;
  opts.mode = mode;
  opts.exact_flow = b.exact_flow;
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj =
      simulate(b.system, b.constraint, State{0.0, b.default_q0, b.default_v0}, 0.1, 18.0, opts);
  const double runtime = detail::seconds_since(start);

  const double e0 = energy(b.system, traj.samples.front());
  const double drift = detail::max_energy_drift(b.system, traj, e0);
  double worst_g = -1e300;
  for (const auto& s : traj.samples) worst_g = std::max(worst_g, b.constraint(s.q));
  for (const auto& ev : traj.impacts) worst_g = std::max(worst_g, b.constraint(ev.q_impact));

  bool impact_ok = traj.impacts.size() == 1;
  double t_err = -1.0, refl_err = -1.0, lambda_err = -1.0;
  if (impact_ok) {
    const auto& ev = traj.impacts.front();
    t_err = std::abs(ev.t_impact - 9.0);
    refl_err = std::max(std::abs(ev.v_plus(0) + ev.v_minus(0)), std::abs(ev.v_plus(1) - ev.v_minus(1)));
    // -2 (m R^2 + I) v1- / R with m = I = R = 1
    lambda_err = std::abs(ev.lambda0 - (-2.0 * (1.0 + 1.0) * ev.v_minus(0) / 1.0));
    lambda_err = std::max(lambda_err, std::abs(ev.lambda0 + 4.0));
    impact_ok = t_err <= 1e-6 && refl_err <= 1e-10 && lambda_err <= 1e-8;
  }
  r.passed = impact_ok && drift <= 1e-9 && worst_g <= 1e-8 && runtime < 0.1;
  std::ostringstream os;
  os << "impacts=" << traj.impacts.size() << " t_err=" << detail::sci(t_err)
     << " reflection_err=" << detail::sci(refl_err) << " lambda0_err=" << detail::sci(lambda_err)
     << " energy_drift=" << detail::sci(drift) << " max_g=" << detail::sci(worst_g)
     << " runtime=" << runtime << "s";
  r.detail = os.str();
  return r;
}

/// Finite-difference structure constants against the analytic brackets of
/// both built-ins, plus antisymmetry on random frames.
inline CheckResult structure_constant_suite(unsigned seed = 7) {
  CheckResult r{"A3", "structure constants (finite differences vs analytic)", false, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> radius(0.3, 2.0);

  const FrameField sleigh = detail::without_jacobian(sleigh_frame());
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector q = Eigen::Vector3d(pos(rng), pos(rng), ang(rng));
    const auto c = structure_constants(sleigh, q);
    worst = std::max({worst, std::abs(c(0, 0, 1)), std::abs(c(1, 0, 1)),
                      std::abs(c(2, 0, 1) + 1.0)});
  }
  for (int trial = 0; trial < 100; ++trial) {
    const double R = radius(rng);
    const FrameField disk = detail::without_jacobian(disk_frame(R));
    const Vector q = Eigen::Vector4d(pos(rng), pos(rng), ang(rng), ang(rng));
    const auto c = structure_constants(disk, q);
    worst = std::max({worst, std::abs(c(0, 0, 1)), std::abs(c(1, 0, 1)),
                      std::abs(c(2, 0, 1) - R * std::sin(q(3))),
                      std::abs(c(3, 0, 1) + R * std::cos(q(3)))});
  }

  double worst_antisym = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    const FrameField f = oracle::random_frame(n, n, rng);
    Vector q(n);
    for (int i = 0; i < n; ++i) q(i) = pos(rng);
    const auto c = structure_constants(f, q);
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst_antisym = std::max(worst_antisym, std::abs(c(m, i, j) + c(m, j, i)));
  }
  r.passed = worst <= 1e-6 && worst_antisym <= 1e-8;
  r.detail = "max_err=" + detail::sci(worst) + " max_antisymmetry=" + detail::sci(worst_antisym);
  return r;
}

/// Hamel integration vs Lagrange-d'Alembert integration, 10 s at h = 1e-3.
inline CheckResult hamel_lda_equivalence() {
  CheckResult r{"A4", "Hamel vs Lagrange-d'Alembert cross-check", false, ""};
  struct Case {
    BuiltinSystem b;
    Vector q0;
    Vector v0;
  };
  std::vector<Case> cases;
  cases.push_back({make_builtin("chaplygin-sleigh"), Eigen::Vector3d(0.0, 0.0, std::numbers::pi / 2),
                   Eigen::Vector2d(0.1, 0.05)});
  cases.push_back({make_builtin("chaplygin-sleigh", {{"m", 2.0}, {"I", 0.3}}),
                   Eigen::Vector3d(0.1, -0.2, 0.3), Eigen::Vector2d(0.4, 0.9)});
  cases.push_back({make_builtin("vertical-disk"), Eigen::Vector4d(0.0, 0.0, 0.0, std::numbers::pi / 2),
                   Eigen::Vector2d(1.0, 0.0)});
  cases.push_back({make_builtin("vertical-disk", {{"m", 2.0}, {"I", 0.5}, {"J", 0.7}, {"R", 0.6}}),
                   Eigen::Vector4d(0.3, -0.1, 0.2, 0.4), Eigen::Vector2d(0.8, 0.5)});
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, detail::hamel_vs_lda(c.b.system, c.q0, c.v0, 1e-3, 10.0));
  }
  r.passed = worst <= 1e-6;
  r.detail = "cases=" + std::to_string(cases.size()) + " max|q_hamel - q_lda|=" + detail::sci(worst);
  return r;
}

/// Randomized constant-coefficient system with a flat boundary a . q <= b.
struct RandomJumpCase {
  MechanicalSystem system;
  InequalityConstraint constraint;
  Vector q;
  Vector v_minus;
};

template <typename Rng>
RandomJumpCase random_jump_case(Rng& rng) {
  std::uniform_int_distribution<int> rank_dist(1, 5);
  std::uniform_int_distribution<int> extra_dist(0, 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int k = rank_dist(rng);
  const int n = k + extra_dist(rng);

  const Matrix mass = oracle::random_spd(n, rng);
  Matrix psi = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) psi(i, j) += 0.4 * unit(rng);
  while (std::abs(psi.determinant()) < 1e-2) psi += 0.5 * Matrix::Identity(n, n);

  Vector a(n);
  for (int i = 0; i < n; ++i) a(i) = unit(rng);
  // The normal must see the distribution, otherwise there is no impact.
  while ((psi.leftCols(k).transpose() * a).norm() < 0.2) {
    for (int i = 0; i < n; ++i) a(i) = unit(rng);
  }
  Vector q(n);
  for (int i = 0; i < n; ++i) q(i) = unit(rng);
  const double offset = a.dot(q);

  RandomJumpCase out;
  out.system.name = "random";
  out.system.frame.dim = n;
  out.system.frame.rank = k;
  out.system.frame.psi = [psi](const Vector&) { return psi; };
  out.system.mass_matrix = [mass](const Vector&) { return mass; };
  out.system.potential = [](const Vector&) { return 0.0; };
  out.constraint.g = [a, offset](const Vector& x) { return a.dot(x) - offset; };
  out.constraint.grad_g = [a](const Vector&) { return a; };
  out.q = q;

  const Vector normal = psi.leftCols(k).transpose() * a;
  Vector v(k);
  do {
    for (int i = 0; i < k; ++i) v(i) = unit(rng);
    if (normal.dot(v) < 0.0) v = -v;
  } while (normal.dot(v) < 1e-3);
  out.v_minus = v;
  return out;
}

/// Closed-form jump against energy, momentum-membership, sign, involution
/// and root-search oracles on random systems.
inline CheckResult jump_property_suite(int trials = 1000, unsigned seed = 11) {
  CheckResult r{"A5", "jump solver property suite", false, ""};
  std::mt19937_64 rng(seed);
  double e_err = 0.0, p_err = 0.0, lambda_max = -1e300, inv_err = 0.0, oracle_err = 0.0;
  double penetration = -1e300;
  for (int t = 0; t < trials; ++t) {
    const auto c = random_jump_case(rng);
    const auto& sys = c.system;
    const int n = sys.dim();
    const int k = sys.rank();
    const auto jump = jump_solve(sys, c.constraint, c.q, c.v_minus);

    const double e_minus = energy(sys, c.q, pad_velocity(sys, c.v_minus));
    const double e_plus = energy(sys, c.q, pad_velocity(sys, jump.v_plus));
    e_err = std::max(e_err, std::abs(e_plus - e_minus) / std::abs(e_minus));

    // p+ - p- as a coordinate covector vs lambda^a u*_a + lambda0 dg.
    const Matrix psi = sys.frame.psi(c.q);
    const Matrix psi_inv = psi.inverse();
    const Vector dp = quasi_momentum(sys, c.q, pad_velocity(sys, jump.v_plus)) -
                      quasi_momentum(sys, c.q, pad_velocity(sys, c.v_minus));
    const Vector dp_coord = psi_inv.transpose() * dp;
    Vector expected = jump.lambda0 * c.constraint.gradient(c.q);
    for (int a = k; a < n; ++a) expected += jump.lambda_a(a - k) * psi_inv.row(a).transpose();
    p_err = std::max(p_err, (dp_coord - expected).lpNorm<Eigen::Infinity>());

    lambda_max = std::max(lambda_max, jump.lambda0);
    const Vector normal = psi.leftCols(k).transpose() * c.constraint.gradient(c.q);
    penetration = std::max(penetration, normal.dot(jump.v_plus));

    InequalityConstraint reversed;
    reversed.g = [g = c.constraint.g](const Vector& x) { return -g(x); };
    reversed.grad_g = [dg = c.constraint.grad_g](const Vector& x) -> Vector { return -dg(x); };
    const auto back = jump_solve(sys, reversed, c.q, jump.v_plus);
    inv_err = std::max(inv_err, (back.v_plus - c.v_minus).lpNorm<Eigen::Infinity>());

    const Matrix mass_d = (psi.transpose() * sys.mass_matrix(c.q) * psi).topLeftCorner(k, k);
    const auto root = oracle::jump_by_root_search(mass_d, normal, c.v_minus);
    oracle_err = std::max({oracle_err, (root.v_plus - jump.v_plus).lpNorm<Eigen::Infinity>(),
                           std::abs(root.lambda0 - jump.lambda0)});
  }
  r.passed = e_err <= 1e-10 && p_err <= 1e-8 && lambda_max <= 0.0 && inv_err <= 1e-10 &&
             oracle_err <= 1e-8 && penetration <= 1e-9;
  std::ostringstream os;
  os << "trials=" << trials << " energy_err=" << detail::sci(e_err)
     << " momentum_err=" << detail::sci(p_err) << " max_lambda0=" << detail::sci(lambda_max)
     << " involution_err=" << detail::sci(inv_err) << " oracle_err=" << detail::sci(oracle_err)
     << " max_post_rate=" << detail::sci(penetration);
  r.detail = os.str();
  return r;
}

/// Observed convergence orders of rk4_step against the exact sleigh flow for
/// step sizes h0, h0/2, ...; returns the orders between consecutive halvings.
inline std::vector<double> sleigh_rk4_orders(double h0 = 0.4, int levels = 5, double t_end = 4.0) {
  const auto b = make_builtin("chaplygin-sleigh");
  const SleighParams p;
  const State init{0.0, Eigen::Vector3d(0.1, -0.2, 0.3), Eigen::Vector2d(1.0, 2.0)};
  const State exact = exact_flow_sleigh(p, init, t_end);
  std::vector<double> errors;
  double h = h0;
  for (int level = 0; level < levels; ++level, h *= 0.5) {
    State s = init;
    const long steps = step_count(h, t_end);
    for (long i = 0; i < steps; ++i) s = rk4_step(b.system, s, h);
    errors.push_back((s.q - exact.q).lpNorm<Eigen::Infinity>());
  }
  std::vector<double> orders;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    orders.push_back(std::log2(errors[i - 1] / errors[i]));
  }
  return orders;
}

inline CheckResult rk4_order_study() {
  CheckResult r{"A6", "RK4 convergence order (sleigh step halving)", false, ""};
  const auto orders = sleigh_rk4_orders();
  const double worst = *std::min_element(orders.begin(), orders.end());
  r.passed = worst >= 3.9;
  std::ostringstream os;
  os << "orders=";
  for (std::size_t i = 0; i < orders.size(); ++i) os << (i ? "," : "") << orders[i];
  os << " min=" << worst;
  r.detail = os.str();
  return r;
}

/// Frame-bracket consistency against the finite-difference Lie bracket.
inline CheckResult bracket_consistency(unsigned seed = 5) {
  CheckResult r{"I1", "structure constants reproduce Jacobi-Lie brackets", false, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  double worst = 0.0;
  std::vector<FrameField> frames{sleigh_frame(), disk_frame(0.7)};
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    frames.push_back(oracle::random_frame(n, n, rng));
  }
  for (const auto& f : frames) {
    for (int trial = 0; trial < 5; ++trial) {
      Vector q(f.dim);
      for (int i = 0; i < f.dim; ++i) q(i) = pos(rng);
      const auto c = structure_constants(f, q);
      const Matrix psi = f.psi(q);
      for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j) {
          const Vector diff = oracle::lie_bracket(f, q, i, j) - psi * c.bracket(i, j);
          worst = std::max(worst, diff.lpNorm<Eigen::Infinity>());
        }
    }
  }
  r.passed = worst <= 1e-6;
  r.detail = "frames=" + std::to_string(frames.size()) + " max_err=" + detail::sci(worst);
  return r;
}

/// Closed-form flows against RK4 at h = 1e-4 over 1 s from random states.
inline CheckResult exact_flow_agreement(unsigned seed = 3) {
  CheckResult r{"I2", "exact flows agree with RK4 (h = 1e-4, 1 s)", false, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& name : builtin_names()) {
    const auto b = make_builtin(name);
    for (int trial = 0; trial < 3; ++trial) {
      State s;
      s.q = Vector(b.system.dim());
      for (int i = 0; i < s.q.size(); ++i) s.q(i) = 2.0 * unit(rng);
      s.v = Vector(b.system.rank());
      for (int i = 0; i < s.v.size(); ++i) s.v(i) = unit(rng);
      const State exact = b.exact_flow(s, 1.0);
      State num = s;
      for (int i = 0; i < 10000; ++i) num = rk4_step(b.system, num, 1e-4);
      worst = std::max({worst, (num.q - exact.q).lpNorm<Eigen::Infinity>(),
                        (num.v - exact.v).lpNorm<Eigen::Infinity>()});
    }
  }
  r.passed = worst <= 1e-8;
  r.detail = "max_err=" + detail::sci(worst);
  return r;
}

/// Reference runs stay in the distribution and keep v piecewise constant.
inline CheckResult trajectory_invariants() {
  CheckResult r{"I3", "constraint satisfaction and constant quasivelocities", false, ""};
  double worst_mu = 0.0;
  double worst_dv = 0.0;
  for (const auto& name : builtin_names()) {
    const auto b = make_builtin(name);
    const Trajectory traj = simulate(b.system, b.constraint, State{0.0, b.default_q0, b.default_v0},
                                     b.default_h, b.default_t_max);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      const State& s = traj.samples[i];
      const Vector qdot = eval_frame(b.system.frame, s.q) * pad_velocity(b.system, s.v);
      const Matrix mu = constraint_forms(b.system, s.q);
      worst_mu = std::max(worst_mu, (mu * qdot).lpNorm<Eigen::Infinity>());
      if (i == 0) continue;
      // Compare against the previous sample, or the post-jump velocity if an
      // impact occurred in between.
      Vector reference = traj.samples[i - 1].v;
      for (const auto& ev : traj.impacts) {
        if (ev.next_sample == i) reference = ev.v_plus;
      }
      worst_dv = std::max(worst_dv, (s.v - reference).lpNorm<Eigen::Infinity>());
    }
  }
  r.passed = worst_mu <= 1e-8 && worst_dv <= 1e-12;
  r.detail = "max|mu qdot|=" + detail::sci(worst_mu) + " max|dv|=" + detail::sci(worst_dv);
  return r;
}

/// Acceptance criteria A1-A6 in order.
inline std::vector<std::function<CheckResult()>> acceptance_checks() {
  return {
      [] { return sleigh_reference_run(IntegrationMode::rk4); },
      [] { return sleigh_reference_run(IntegrationMode::exact); },
      [] { return disk_reference_run(IntegrationMode::rk4); },
      [] { return disk_reference_run(IntegrationMode::exact); },
      [] { return structure_constant_suite(); },
      [] { return hamel_lda_equivalence(); },
      [] { return jump_property_suite(); },
      [] { return rk4_order_study(); },
  };
}

/// Acceptance criteria followed by the additional invariant checks.
inline std::vector<std::function<CheckResult()>> all_checks() {
  auto checks = acceptance_checks();
  checks.push_back([] { return bracket_consistency(); });
  checks.push_back([] { return exact_flow_agreement(); });
  checks.push_back([] { return trajectory_invariants(); });
  return checks;
}

/// Runs every check, catching library errors as failures.
inline CheckResult run_check(const std::function<CheckResult()>& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return {"?", "check raised an exception", false, e.what()};
  }
}

}  // namespace hamel::validation
