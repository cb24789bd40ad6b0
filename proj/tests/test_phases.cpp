#include <doctest.h>

#include <cmath>

#include "cini/invariant.hpp"
#include "cini/model.hpp"
#include "cini/oracle.hpp"
#include "cini/phases.hpp"

using namespace cini;

namespace {

DetectorParams detector_const(double w1, double w2) {
  return {Schedule::constant(w1), Schedule::constant(w2)};
}

LevelParams level_const(double E, double r, double chi) {
  LevelParams lp;
  lp.E = Schedule::constant(E);
  lp.g.amplitude = Schedule::constant(r);
  lp.g.phase = Schedule::constant(chi);
  return lp;
}

struct FixedPointSetup {
  DetectorParams det = detector_const(1.4, 0.4);
  LevelParams lvl = level_const(0.2, 0.3, 0.7);
  SubspaceLabel label{2, 0};
  SU2Rep rep = build_rep(2);
  TimeGrid grid{0.0, 5.0, 5000};

  BranchEvolution evolve(const InitialState& init) const {
    return evolve_branch(det, lvl, label, 0, rep, grid, AlignedAuxInit{}, init);
  }
};

// Rotating coupling phase tuned so lambda = pi/3 and gamma_dot = 1 solve the
// auxiliary equations exactly: theta = pi/2, c = sqrt(3), phi(t) = t + pi.
struct RotatingSetup {
  DetectorParams det = detector_const(1.0, 1.0);
  LevelParams lvl;
  TimeGrid grid{0.0, 2 * M_PI, 4000};
  RotatingSetup(double rate = 1.0, double energy = 0.0) {
    lvl.E = Schedule::constant(energy);
    lvl.g.amplitude = Schedule::constant(rate * std::sqrt(3.0) / 2);
    lvl.g.phase = Schedule::linear(-M_PI, -rate);
    grid = TimeGrid(0.0, 2 * M_PI / rate, 4000);
  }
  AuxiliaryTrajectory aux() const {
    return integrate_auxiliary(make_spherical_source(det, lvl, 0.5), M_PI / 3, 0.0, grid);
  }
};

}  // namespace

TEST_CASE("dynamical_phase: constant eigenphase at the aligned fixed point") {
  const FixedPointSetup fx;
  const SphericalSource src = make_spherical_source(fx.det, fx.lvl, fx.label.n());
  const SphericalParams sp0 = src(0.0);
  const AuxiliaryTrajectory traj =
      integrate_auxiliary(src, sp0.theta, sp0.phi, fx.grid);
  std::vector<SphericalParams> sph;
  for (int i = 0; i < fx.grid.num_nodes(); ++i) sph.push_back(src(fx.grid.node(i)));
  const RealVector pd = dynamical_phase(1, traj, sph);  // m = 1/2
  for (int i : {100, 2500, 5000}) {
    const double expected = -(sp0.c / 2 + sp0.f) * fx.grid.node(i);
    CHECK(pd(i) == doctest::Approx(expected).epsilon(1e-11));
  }
  // oracle cross-check: the aligned eigenstate only accumulates this phase
  const BranchEvolution br = fx.evolve(AlignedInitialState{2});
  const StateSeq orc = direct_propagate(
      make_hamiltonian_source(fx.det, fx.lvl, fx.label, fx.rep), br.psi.front(), fx.grid);
  CHECK(fidelity(br.psi, orc) >= 1.0 - 1e-9);
}

TEST_CASE("dynamical_phase: pure energy shift when the drive vanishes") {
  // c = 0 (equal frequencies, zero coupling): phase is -E t for every m
  const DetectorParams det = detector_const(0.0, 0.0);
  const LevelParams lvl = level_const(0.8, 0.0, 0.0);
  const TimeGrid grid(0.0, 4.0, 2000);
  const SphericalSource src = make_spherical_source(det, lvl, 1.0);
  const AuxiliaryTrajectory traj = integrate_auxiliary(src, 0.4, 0.0, grid);
  std::vector<SphericalParams> sph;
  for (int i = 0; i < grid.num_nodes(); ++i) sph.push_back(src(grid.node(i)));
  for (int two_m : {-2, 0, 2}) {
    const RealVector pd = dynamical_phase(two_m, traj, sph);
    CHECK(pd(2000) == doctest::Approx(-0.8 * 4.0).epsilon(1e-12));
  }
}

TEST_CASE("dynamical_phase: quarter-turn case integrates only f") {
  const DetectorParams det = detector_const(1.0, 1.0);
  const LevelParams lvl = level_const(0.3, 0.5, -M_PI / 2);
  const TimeGrid grid(0.0, 6.0, 3000);
  const SphericalSource src = make_spherical_source(det, lvl, 3.0);
  const AuxiliaryTrajectory traj = integrate_auxiliary(src, 0.1, 0.0, grid);
  std::vector<SphericalParams> sph;
  for (int i = 0; i < grid.num_nodes(); ++i) sph.push_back(src(grid.node(i)));
  const double f = 0.3 + 3.0 * 2.0;
  for (int two_m : {6, -4}) {
    const RealVector pd = dynamical_phase(two_m, traj, sph);
    CHECK(pd(3000) == doctest::Approx(-f * 6.0).epsilon(1e-9));
  }
}

TEST_CASE("geometric_phase: zero for a frozen polar angle at the pole") {
  AuxiliaryTrajectory traj;
  traj.grid = TimeGrid(0.0, 2.0, 200);
  traj.lambda = RealVector::Zero(201);
  traj.gamma = RealVector::LinSpaced(201, 0.0, 2.0);
  traj.gamma_dot = RealVector::Ones(201);
  CHECK(geometric_phase(3, traj).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("geometric_phase: solid angle over one cycle and linearity in m") {
  AuxiliaryTrajectory traj;
  traj.grid = TimeGrid(0.0, 2 * M_PI, 4000);
  const int n = traj.grid.num_nodes();
  traj.lambda = RealVector::Constant(n, M_PI / 3);
  traj.gamma = RealVector::LinSpaced(n, 0.0, 2 * M_PI);
  traj.gamma_dot = RealVector::Ones(n);
  const RealVector pg_half = geometric_phase(1, traj);
  CHECK(pg_half(n - 1) == doctest::Approx(-M_PI / 2).epsilon(1e-9));
  const RealVector pg_one = geometric_phase(2, traj);
  CHECK(pg_one(n - 1) == doctest::Approx(-M_PI).epsilon(1e-9));
  for (int two_m : {-4, -1, 3}) {
    const RealVector pg = geometric_phase(two_m, traj);
    for (int i : {500, 4000})
      CHECK(pg(i) / (two_m / 2.0) == doctest::Approx(pg_half(i) * 2.0).epsilon(1e-12));
  }
}

TEST_CASE("geometric_phase: physically driven cycle matches the solid angle") {
  const RotatingSetup rot;
  const AuxiliaryTrajectory traj = rot.aux();
  CHECK((traj.lambda.array() - M_PI / 3).abs().maxCoeff() <= 1e-10);
  CHECK((traj.gamma_dot.array() - 1.0).abs().maxCoeff() <= 1e-9);
  const RealVector pg = geometric_phase(1, traj);
  CHECK(pg(traj.grid.steps) == doctest::Approx(-0.5 * cyclic_solid_angle(M_PI / 3)).epsilon(1e-9));
}

TEST_CASE("geometric phase is reparameterization-invariant; dynamical is not") {
  SUBCASE("quarter-turn configuration") {
    // doubling c and halving the horizon: geometric stays (identically zero
    // here), the f part of the dynamical phase halves
    const DetectorParams det = detector_const(1.0, 1.0);
    const TimeGrid g1(0.0, 6.0, 3000), g2(0.0, 3.0, 3000);
    const LevelParams l1 = level_const(0.3, 0.5, -M_PI / 2);
    const LevelParams l2 = level_const(0.3, 1.0, -M_PI / 2);
    const SphericalSource s1 = make_spherical_source(det, l1, 3.0);
    const SphericalSource s2 = make_spherical_source(det, l2, 3.0);
    const AuxiliaryTrajectory t1 = integrate_auxiliary(s1, 0.1, 0.0, g1);
    const AuxiliaryTrajectory t2 = integrate_auxiliary(s2, 0.1, 0.0, g2);
    CHECK(t1.lambda(3000) == doctest::Approx(t2.lambda(3000)).epsilon(1e-10));
    const RealVector pg1 = geometric_phase(2, t1), pg2 = geometric_phase(2, t2);
    CHECK(std::abs(pg1(3000) - pg2(3000)) <= 1e-9);
    std::vector<SphericalParams> sph1, sph2;
    for (int i = 0; i <= 3000; ++i) sph1.push_back(s1(g1.node(i)));
    for (int i = 0; i <= 3000; ++i) sph2.push_back(s2(g2.node(i)));
    const RealVector pd1 = dynamical_phase(2, t1, sph1), pd2 = dynamical_phase(2, t2, sph2);
    CHECK(pd1(3000) == doctest::Approx(2.0 * pd2(3000)).epsilon(1e-9));  // -fT vs -fT/2
  }
  SUBCASE("rotating drive with a nonzero solid angle") {
    const RotatingSetup slow(1.0, 0.3), fast(2.0, 0.3);
    const AuxiliaryTrajectory t1 = slow.aux(), t2 = fast.aux();
    const RealVector pg1 = geometric_phase(1, t1), pg2 = geometric_phase(1, t2);
    CHECK(pg1(t1.grid.steps) == doctest::Approx(pg2(t2.grid.steps)).epsilon(1e-9));
  }
}

TEST_CASE("phase quadrature refines at second order") {
  DetectorParams det{Schedule::constant(1.5), Schedule::constant(0.7)};
  LevelParams lvl;
  lvl.E = Schedule::linear(0.2, 0.1);
  lvl.g.amplitude = Schedule::sum({Schedule::constant(0.6), Schedule::cosine(0.25, 1.1, 0.3)});
  lvl.g.phase = Schedule::cosine(0.8, 0.9, 0.5);
  const SphericalSource src = make_spherical_source(det, lvl, 2.0);
  auto final_phase = [&](int steps) {
    const TimeGrid grid(0.0, 2.0, steps);
    const AuxiliaryTrajectory traj = integrate_auxiliary(src, src(0.0).theta, src(0.0).phi, grid);
    std::vector<SphericalParams> sph;
    for (int i = 0; i < grid.num_nodes(); ++i) sph.push_back(src(grid.node(i)));
    return dynamical_phase(1, traj, sph)(steps) + geometric_phase(1, traj)(steps);
  };
  const double p1 = final_phase(200), p2 = final_phase(400), p3 = final_phase(800);
  const double ratio = (p1 - p2) / (p2 - p3);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("cyclic_solid_angle: values and domain") {
  CHECK(cyclic_solid_angle(0.0) == 0.0);
  CHECK(cyclic_solid_angle(M_PI / 2) == doctest::Approx(2 * M_PI).epsilon(1e-15));
  CHECK(cyclic_solid_angle(M_PI) == doctest::Approx(4 * M_PI).epsilon(1e-15));
  CHECK_THROWS_AS(cyclic_solid_angle(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(cyclic_solid_angle(3.2), std::invalid_argument);
}

TEST_CASE("coefficients_from_initial: projections and completeness") {
  const SU2Rep rep = build_rep(3);
  const Matrix v0 = build_V(Complex(0.3, -0.5), rep);
  SUBCASE("aligned stretched state") {
    const Vector c = coefficients_from_initial(v0.col(0), v0);
    CHECK(std::abs(c(0) - Complex(1, 0)) <= 1e-12);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(c(i)) <= 1e-12);
  }
  SUBCASE("identity transformation picks out basis states") {
    Vector e2 = Vector::Zero(4);
    e2(2) = 1.0;
    const Vector c = coefficients_from_initial(e2, Matrix::Identity(4, 4));
    CHECK(std::abs(c(2) - Complex(1, 0)) == 0.0);
  }
  SUBCASE("reconstruction recovers psi0") {
    Vector psi0(4);
    psi0 << Complex(0.1, 0.4), Complex(-0.3, 0.2), Complex(0.5, 0.0), Complex(0.2, -0.6);
    psi0.normalize();
    const Vector c = coefficients_from_initial(psi0, v0);
    CHECK(std::abs(c.norm() - 1.0) <= 1e-12);
    CHECK((v0 * c - psi0).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("rejects non-normalized input") {
    CHECK_THROWS_AS(coefficients_from_initial(2.0 * v0.col(0), v0), std::invalid_argument);
  }
}

TEST_CASE("assemble_solution: initial-state reproduction and norm preservation") {
  const FixedPointSetup fx;
  Vector psi0(3);
  psi0 << Complex(0.2, 0.1), Complex(-0.5, 0.3), Complex(0.4, -0.2);
  psi0.normalize();
  const BranchEvolution br = fx.evolve(psi0);
  CHECK((br.psi.front() - psi0).cwiseAbs().maxCoeff() <= 1e-12);
  double worst = 0.0;
  for (const Vector& psi : br.psi) worst = std::max(worst, std::abs(psi.norm() - 1.0));
  CHECK(worst <= 1e-10);
}

TEST_CASE("assemble_solution: single coefficient stays normalized") {
  const FixedPointSetup fx;
  const BranchEvolution br = fx.evolve(AlignedInitialState{-2});
  CHECK(std::abs(br.coefficients(0)) <= 1e-12);
  CHECK(std::abs(br.coefficients(1)) <= 1e-12);
  CHECK(std::abs(br.coefficients(2) - Complex(1, 0)) <= 1e-12);
  for (const Vector& psi : br.psi) CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);
}
