#ifndef CINI_PHASES_HPP
#define CINI_PHASES_HPP

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cini/invariant.hpp"
#include "cini/model.hpp"
#include "cini/su2.hpp"
#include "cini/types.hpp"

namespace cini {

/// Accumulated dynamical and geometric phases for one weight m, sampled on
/// the trajectory grid. Both start at zero; the total phase is their sum.
struct PhaseTrace {
  TimeGrid grid;
  int two_m = 0;
  RealVector dynamical;
  RealVector geometric;

  RealVector total() const { return dynamical + geometric; }
};

namespace detail {

// Cumulative composite trapezoid of integrand samples on a uniform grid.
inline RealVector cumulative_trapezoid(const RealVector& integrand, double h) {
  RealVector out(integrand.size());
  out(0) = 0.0;
  for (Eigen::Index i = 1; i < integrand.size(); ++i)
    out(i) = out(i - 1) + h / 2 * (integrand(i - 1) + integrand(i));
  return out;
}

}  // namespace detail

/// Dynamical phase
///   phi^d_m(t) = -int_0^t { m c [cos(lambda)cos(theta) + sin(lambda)sin(theta)cos(gamma-phi)] + f } dt'
/// by composite trapezoid on the grid. The drive magnitude c multiplies the
/// bracket (see transformed_h_coefficient).
inline RealVector dynamical_phase(int two_m, const AuxiliaryTrajectory& traj,
                                  const std::vector<SphericalParams>& spherical) {
  const int n = traj.grid.num_nodes();
  if (spherical.size() != static_cast<size_t>(n))
    throw std::invalid_argument("dynamical_phase: spherical samples do not match grid");
  const double m = two_m / 2.0;
  RealVector integrand(n);
  for (int i = 0; i < n; ++i) {
    const SphericalParams& sp = spherical[i];
    const double bracket = std::cos(traj.lambda(i)) * std::cos(sp.theta) +
                           std::sin(traj.lambda(i)) * std::sin(sp.theta) *
                               std::cos(traj.gamma(i) - sp.phi);
    integrand(i) = -(m * sp.c * bracket + sp.f);
  }
  return detail::cumulative_trapezoid(integrand, traj.grid.dt());
}

/// Geometric phase phi^g_m(t) = -m int_0^t gamma_dot (1 - cos lambda) dt'.
inline RealVector geometric_phase(int two_m, const AuxiliaryTrajectory& traj) {
  const double m = two_m / 2.0;
  RealVector integrand(traj.grid.num_nodes());
  for (int i = 0; i < traj.grid.num_nodes(); ++i)
    integrand(i) = -m * traj.gamma_dot(i) * (1 - std::cos(traj.lambda(i)));
  return detail::cumulative_trapezoid(integrand, traj.grid.dt());
}

inline PhaseTrace compute_phase_trace(int two_m, const AuxiliaryTrajectory& traj,
                                      const std::vector<SphericalParams>& spherical) {
  PhaseTrace pt;
  pt.grid = traj.grid;
  pt.two_m = two_m;
  pt.dynamical = dynamical_phase(two_m, traj, spherical);
  pt.geometric = geometric_phase(two_m, traj);
  return pt;
}

/// Solid angle swept by a cyclic invariant path at constant polar angle:
/// 2 pi (1 - cos lambda). The per-cycle geometric phase is -m times this.
inline double cyclic_solid_angle(double lambda) {
  if (lambda < 0.0 || lambda > M_PI)
    throw std::invalid_argument("cyclic_solid_angle: lambda must lie in [0, pi]");
  return 2 * M_PI * (1 - std::cos(lambda));
}

/// Expansion coefficients C_m = <j,m| V^dag(t0) |psi0> in basis order.
inline Vector coefficients_from_initial(const Vector& psi0, const Matrix& v0) {
  if (psi0.size() != v0.rows())
    throw std::invalid_argument("coefficients_from_initial: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("coefficients_from_initial: psi0 must be normalized");
  return v0.adjoint() * psi0;
}

/// psi(t_i) = sum_m C_m exp(i [phi^d_m + phi^g_m](t_i)) V(t_i) |j,m>.
/// Phase traces must be supplied in basis order m = j, ..., -j.
inline StateSeq assemble_solution(const Vector& coefficients,
                                  const std::vector<PhaseTrace>& phases, const MatrixSeq& v_seq) {
  if (phases.empty() || coefficients.size() != static_cast<Eigen::Index>(phases.size()))
    throw std::invalid_argument("assemble_solution: coefficient/phase count mismatch");
  const int n = phases.front().grid.num_nodes();
  if (v_seq.size() != static_cast<size_t>(n))
    throw std::invalid_argument("assemble_solution: V samples do not match grid");
  const Eigen::Index dim = coefficients.size();
  StateSeq states;
  states.reserve(n);
  Vector weighted(dim);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index mi = 0; mi < dim; ++mi) {
      const double phase = phases[mi].dynamical(i) + phases[mi].geometric(i);
      weighted(mi) = coefficients(mi) * Complex(std::cos(phase), std::sin(phase));
    }
    states.push_back(v_seq[i] * weighted);
  }
  return states;
}

struct AlignedAuxInit {};
struct ExplicitAuxInit {
  double lambda0 = 0.0;
  double gamma0 = 0.0;
};
using AuxInit = std::variant<AlignedAuxInit, ExplicitAuxInit>;

/// Initial state |psi(t0)> = V(t0)|j,m>, the invariant eigenstate at t0.
struct AlignedInitialState {
  int two_m = 0;
};
using InitialState = std::variant<AlignedInitialState, Vector>;

/// Everything computed for one (n, k) branch: angles, displacement, unitary
/// samples, per-m phases, coefficients, and the assembled state trajectory.
struct BranchEvolution {
  SubspaceLabel label;
  int level_k = 0;
  std::vector<SphericalParams> spherical;
  AuxiliaryTrajectory aux;
  DisplacementParams displacement;
  MatrixSeq v_seq;
  std::vector<PhaseTrace> phases;  // basis order m = j ... -j
  Vector coefficients;
  StateSeq psi;
};

inline BranchEvolution evolve_branch(const DetectorParams& det, const LevelParams& lvl,
                                     const SubspaceLabel& label, int level_k, const SU2Rep& rep,
                                     const TimeGrid& grid, const AuxInit& aux_init,
                                     const InitialState& initial, double eps_sing = 1e-9) {
  if (rep.two_j != label.two_j())
    throw std::invalid_argument("evolve_branch: representation/label mismatch");
  BranchEvolution br;
  br.label = label;
  br.level_k = level_k;

  const SphericalSource source = make_spherical_source(det, lvl, label.n());
  br.spherical.reserve(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i) br.spherical.push_back(source(grid.node(i)));

  double lambda0, gamma0;
  if (std::holds_alternative<AlignedAuxInit>(aux_init)) {
    lambda0 = br.spherical.front().theta;
    gamma0 = br.spherical.front().phi;
  } else {
    const auto& e = std::get<ExplicitAuxInit>(aux_init);
    lambda0 = e.lambda0;
    gamma0 = e.gamma0;
  }
  br.aux = integrate_auxiliary(source, lambda0, gamma0, grid, eps_sing);
  br.displacement = beta_from_aux(br.aux);
  br.v_seq = build_V_sequence(br.displacement, rep);

  br.phases.reserve(rep.dim);
  for (int mi = 0; mi < rep.dim; ++mi)
    br.phases.push_back(compute_phase_trace(two_m_at(rep.two_j, mi), br.aux, br.spherical));

  Vector psi0;
  if (std::holds_alternative<AlignedInitialState>(initial)) {
    const int idx = basis_index(rep.two_j, std::get<AlignedInitialState>(initial).two_m);
    psi0 = br.v_seq.front().col(idx);
  } else {
    psi0 = std::get<Vector>(initial);
  }
  br.coefficients = coefficients_from_initial(psi0, br.v_seq.front());
  br.psi = assemble_solution(br.coefficients, br.phases, br.v_seq);
  return br;
}

}  // namespace cini

#endif  // CINI_PHASES_HPP
