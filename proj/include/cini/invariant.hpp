#ifndef CINI_INVARIANT_HPP
#define CINI_INVARIANT_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "cini/errors.hpp"
#include "cini/model.hpp"
#include "cini/su2.hpp"
#include "cini/types.hpp"

namespace cini {

/// Sampled solution of the auxiliary angle pair (lambda, gamma) on a uniform
/// grid, plus the gamma rate at each node. gamma is stored unwrapped; the
/// phase quadratures integrate gamma_dot, which wrapping would corrupt.
struct AuxiliaryTrajectory {
  TimeGrid grid;
  RealVector lambda;     // rad, steps+1 samples
  RealVector gamma;      // rad, unwrapped, steps+1 samples
  RealVector gamma_dot;  // ODE right-hand side at nodes
  bool degenerate = false;
};

struct AuxiliaryRates {
  double lambda_dot = 0.0;
  double gamma_dot = 0.0;
};

/// Auxiliary equations for the invariant angles:
///   lambda_dot = c sin(theta) sin(phi - gamma)
///   gamma_dot  = c [cos(theta) - sin(theta) cot(lambda) cos(phi - gamma)]
inline AuxiliaryRates auxiliary_rates(const SphericalParams& sp, double lambda, double gamma) {
  const double d = sp.phi - gamma;
  const double sl = std::sin(lambda);
  AuxiliaryRates r;
  r.lambda_dot = sp.c * std::sin(sp.theta) * std::sin(d);
  r.gamma_dot = sp.c * (std::cos(sp.theta) - std::sin(sp.theta) * (std::cos(lambda) / sl) * std::cos(d));
  return r;
}

using AuxiliaryRhs = std::function<AuxiliaryRates(double t, double lambda, double gamma)>;

/// Classic fourth-order one-step integration of a generic (lambda, gamma)
/// rate function. When enforce_floor is set, every stage evaluation requires
/// |sin lambda| >= eps_sing; the first violation raises SingularityError with
/// the offending time. Non-finite states raise NonFiniteError.
inline AuxiliaryTrajectory integrate_auxiliary_rhs(const AuxiliaryRhs& rhs, double lambda0,
                                                   double gamma0, const TimeGrid& grid,
                                                   double eps_sing, bool enforce_floor,
                                                   bool degenerate_tag = false) {
  AuxiliaryTrajectory traj;
  traj.grid = grid;
  traj.degenerate = degenerate_tag;
  const int n = grid.num_nodes();
  traj.lambda.resize(n);
  traj.gamma.resize(n);
  traj.gamma_dot.resize(n);

  auto eval = [&](double t, double lam, double gam) -> AuxiliaryRates {
    if (enforce_floor) {
      const double sl = std::abs(std::sin(lam));
      if (sl < eps_sing) throw SingularityError(t, sl);
    }
    return rhs(t, lam, gam);
  };

  const double h = grid.dt();
  double lam = lambda0;
  double gam = gamma0;
  traj.lambda(0) = lam;
  traj.gamma(0) = gam;
  for (int i = 0; i < grid.steps; ++i) {
    const double t = grid.node(i);
    const auto k1 = eval(t, lam, gam);
    const auto k2 = eval(t + h / 2, lam + h / 2 * k1.lambda_dot, gam + h / 2 * k1.gamma_dot);
    const auto k3 = eval(t + h / 2, lam + h / 2 * k2.lambda_dot, gam + h / 2 * k2.gamma_dot);
    const auto k4 = eval(t + h, lam + h * k3.lambda_dot, gam + h * k3.gamma_dot);
    lam += h / 6 * (k1.lambda_dot + 2 * k2.lambda_dot + 2 * k3.lambda_dot + k4.lambda_dot);
    gam += h / 6 * (k1.gamma_dot + 2 * k2.gamma_dot + 2 * k3.gamma_dot + k4.gamma_dot);
    if (!std::isfinite(lam) || !std::isfinite(gam)) throw NonFiniteError(grid.node(i + 1));
    traj.lambda(i + 1) = lam;
    traj.gamma(i + 1) = gam;
  }
  for (int i = 0; i < n; ++i)
    traj.gamma_dot(i) = eval(grid.node(i), traj.lambda(i), traj.gamma(i)).gamma_dot;
  return traj;
}

/// Integrate the auxiliary pair against a spherical-parameter source.
/// Schedules are re-evaluated at the half-step stage times, preserving
/// fourth-order accuracy.
///
/// If the source is degenerate (|g| = 0) at every node and half node, the
/// pole in cot(lambda) never enters: lambda stays at lambda0 (0 and pi are
/// then permitted) and gamma integrates gamma_dot = c cos(theta).
inline AuxiliaryTrajectory integrate_auxiliary(const SphericalSource& spherical, double lambda0,
                                               double gamma0, const TimeGrid& grid,
                                               double eps_sing = 1e-9) {
  bool all_degenerate = true;
  for (int i = 0; i <= 2 * grid.steps; ++i) {
    if (!spherical(grid.t0 + grid.dt() / 2 * i).degenerate) {
      all_degenerate = false;
      break;
    }
  }
  if (all_degenerate) {
    AuxiliaryRhs rhs = [&spherical](double t, double, double) {
      const SphericalParams sp = spherical(t);
      return AuxiliaryRates{0.0, sp.c * std::cos(sp.theta)};
    };
    return integrate_auxiliary_rhs(rhs, lambda0, gamma0, grid, eps_sing, /*enforce_floor=*/false,
                                   /*degenerate_tag=*/true);
  }
  if (std::abs(std::sin(lambda0)) < eps_sing) throw SingularityError(grid.t0, std::abs(std::sin(lambda0)));
  AuxiliaryRhs rhs = [&spherical](double t, double lam, double gam) {
    return auxiliary_rates(spherical(t), lam, gam);
  };
  return integrate_auxiliary_rhs(rhs, lambda0, gamma0, grid, eps_sing, /*enforce_floor=*/true);
}

/// Displacement parameter beta(t) = -(lambda/2) e^{-i gamma} driving the
/// invariant-related unitary.
struct DisplacementParams {
  Vector beta;
};

inline DisplacementParams beta_from_aux(const AuxiliaryTrajectory& traj) {
  DisplacementParams dp;
  dp.beta.resize(traj.lambda.size());
  for (Eigen::Index i = 0; i < traj.lambda.size(); ++i) {
    const double g = traj.gamma(i);
    dp.beta(i) = -(traj.lambda(i) / 2) * Complex(std::cos(g), -std::sin(g));
  }
  return dp;
}

/// I(lambda, gamma) = (1/2) sin(lambda) e^{-i gamma} J_+ + h.c. + cos(lambda) J3.
/// Hermitian with spectrum {j, j-1, ..., -j} for any angles.
inline Matrix invariant_matrix(double lambda, double gamma, const SU2Rep& rep) {
  const Complex phase(std::cos(gamma), -std::sin(gamma));
  const double sl = std::sin(lambda);
  return 0.5 * sl * phase * rep.J_plus + 0.5 * sl * std::conj(phase) * rep.J_minus +
         std::cos(lambda) * rep.J3;
}

/// V(beta) = exp(beta J_+ - beta* J_-).
inline Matrix build_V(Complex beta, const SU2Rep& rep) { return su2_displacement(rep, beta); }

inline MatrixSeq build_V_sequence(const DisplacementParams& dp, const SU2Rep& rep) {
  MatrixSeq vs;
  vs.reserve(dp.beta.size());
  for (Eigen::Index i = 0; i < dp.beta.size(); ++i) vs.push_back(build_V(dp.beta(i), rep));
  return vs;
}

/// Max over grid nodes of || V^dag(t) I(t) V(t) - J3 || (max-abs entry).
/// The identity holds algebraically for any angle pair, not only ODE
/// solutions, so this measures pure linear-algebra error.
inline double check_transformed_invariant(const AuxiliaryTrajectory& traj, const SU2Rep& rep) {
  const DisplacementParams dp = beta_from_aux(traj);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < dp.beta.size(); ++i) {
    const Matrix v = build_V(dp.beta(i), rep);
    const Matrix inv = invariant_matrix(traj.lambda(i), traj.gamma(i), rep);
    worst = std::max(worst, (v.adjoint() * inv * v - rep.J3).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Central-difference residual of the invariant equation
///   dI/dt + (1/i)[I, H] = 0
/// at interior nodes; returns the max-abs entry over the grid. Converges at
/// second order for trajectories consistent with the auxiliary equations.
inline double check_invariant_ode(const AuxiliaryTrajectory& traj, const MatrixSeq& hamiltonians,
                                  const SU2Rep& rep) {
  const int n = traj.grid.num_nodes();
  if (static_cast<int>(hamiltonians.size()) != n)
    throw std::invalid_argument("check_invariant_ode: Hamiltonian samples do not match grid");
  if (n < 3) throw std::invalid_argument("check_invariant_ode: grid too small");
  const double h = traj.grid.dt();
  const Complex minus_i(0, -1);
  MatrixSeq inv(n);
  for (int i = 0; i < n; ++i) inv[i] = invariant_matrix(traj.lambda(i), traj.gamma(i), rep);
  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const Matrix resid =
        (inv[i + 1] - inv[i - 1]) / (2 * h) + minus_i * commutator(inv[i], hamiltonians[i]);
    worst = std::max(worst, resid.cwiseAbs().maxCoeff());
  }
  return worst;
}

/// J3 coefficient of the transformed Hamiltonian
///   H_V = V^dag H V - i V^dag dV/dt = coeff J3 + f 1,
///   coeff = c [cos(lambda) cos(theta) + sin(lambda) sin(theta) cos(gamma - phi)]
///           + gamma_dot (1 - cos(lambda)).
/// The bracket term carries the drive magnitude c(t); dropping it would be
/// dimensionally inconsistent with the spherical Hamiltonian form, and the
/// direct-propagation fidelity checks validate the factor numerically.
inline double transformed_h_coefficient(const AuxiliaryTrajectory& traj,
                                        const std::vector<SphericalParams>& spherical,
                                        int t_index) {
  if (t_index < 0 || t_index >= traj.grid.num_nodes() ||
      spherical.size() != static_cast<size_t>(traj.grid.num_nodes()))
    throw std::invalid_argument("transformed_h_coefficient: index/samples mismatch");
  const SphericalParams& sp = spherical[t_index];
  const double lam = traj.lambda(t_index);
  const double gam = traj.gamma(t_index);
  const double bracket = std::cos(lam) * std::cos(sp.theta) +
                         std::sin(lam) * std::sin(sp.theta) * std::cos(gam - sp.phi);
  return sp.c * bracket + traj.gamma_dot(t_index) * (1 - std::cos(lam));
}

}  // namespace cini

#endif  // CINI_INVARIANT_HPP
