// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Criterion 10 drives the installed CLI binary (path in $CINI_CLI).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cini/decoherence.hpp"
#include "cini/invariant.hpp"
#include "cini/model.hpp"
#include "cini/oracle.hpp"
#include "cini/phases.hpp"
#include "cini/verify.hpp"

using namespace cini;
namespace fs = std::filesystem;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(const std::string& name, bool pass, const std::string& detail = "") {
  std::cout << (pass ? "PASS " : "FAIL ") << name;
  if (!detail.empty()) std::cout << "  (" << detail << ")";
  std::cout << std::endl;
}

double aligned_lambda0(const RunConfig& cfg, int level) {
  const SphericalSource src =
      make_spherical_source(cfg.detector, cfg.levels[level], cfg.label.n());
  const AuxInit init = cfg.aux_init_for(level);
  if (std::holds_alternative<AlignedAuxInit>(init)) return src(cfg.grid.t0).theta;
  return std::get<ExplicitAuxInit>(init).lambda0;
}

double aligned_gamma0(const RunConfig& cfg, int level) {
  const SphericalSource src =
      make_spherical_source(cfg.detector, cfg.levels[level], cfg.label.n());
  const AuxInit init = cfg.aux_init_for(level);
  if (std::holds_alternative<AlignedAuxInit>(init)) return src(cfg.grid.t0).phi;
  return std::get<ExplicitAuxInit>(init).gamma0;
}

double ode_residual_at(const RunConfig& cfg, int steps) {
  const SU2Rep rep = build_rep(cfg.label.two_j());
  const TimeGrid grid(cfg.grid.t0, cfg.grid.t1, steps);
  const SphericalSource src =
      make_spherical_source(cfg.detector, cfg.levels[0], cfg.label.n());
  const AuxiliaryTrajectory traj =
      integrate_auxiliary(src, aligned_lambda0(cfg, 0), aligned_gamma0(cfg, 0), grid);
  MatrixSeq hs;
  hs.reserve(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i)
    hs.push_back(hamiltonian_matrix(cfg.detector, cfg.levels[0], cfg.label, grid.node(i), rep));
  return check_invariant_ode(traj, hs, rep);
}

// CLI invocation helpers for criterion 10.
struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args, const fs::path& capture) {
  const char* cli = std::getenv("CINI_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "CINI_CLI must point at the command-line binary");
  const std::string cmd = std::string(cli) + " " + args + " > " + capture.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

}  // namespace

TEST_CASE("criterion 1: algebra suite") {
  Stopwatch watch;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  double worst_comm = 0.0, worst_unitary = 0.0;
  for (int two_j = 1; two_j <= 20; ++two_j) {
    const SU2Rep rep = build_rep(two_j);
    worst_comm = std::max(
        worst_comm, (commutator(rep.J3, rep.J_plus) - rep.J_plus).cwiseAbs().maxCoeff());
    worst_comm = std::max(
        worst_comm, (commutator(rep.J3, rep.J_minus) + rep.J_minus).cwiseAbs().maxCoeff());
    worst_comm = std::max(
        worst_comm, (commutator(rep.J_plus, rep.J_minus) - 2.0 * rep.J3).cwiseAbs().maxCoeff());
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix u = su2_displacement(rep, Complex(uni(rng), uni(rng)));
      worst_unitary = std::max(worst_unitary,
                               (u.adjoint() * u - Matrix::Identity(rep.dim, rep.dim))
                                   .cwiseAbs()
                                   .maxCoeff());
    }
  }
  const double elapsed = watch.seconds();
  const bool pass = worst_comm <= 1e-12 && worst_unitary <= 1e-12 && elapsed < 5.0;
  report("criterion 1: su(2) identities + displacement unitarity", pass,
         "comm " + std::to_string(worst_comm) + ", unitary " + std::to_string(worst_unitary) +
             ", " + std::to_string(elapsed) + " s");
  CHECK(worst_comm <= 1e-12);
  CHECK(worst_unitary <= 1e-12);
  CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 2: transformed invariant identity") {
  Stopwatch watch;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ulam(0.0, M_PI), ugam(-M_PI, M_PI);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int two_j = 1 + (i % 8);  // j <= 4
    const SU2Rep rep = build_rep(two_j);
    const double lam = ulam(rng), gam = ugam(rng);
    const Matrix v = build_V(-(lam / 2) * Complex(std::cos(gam), -std::sin(gam)), rep);
    worst = std::max(
        worst, (v.adjoint() * invariant_matrix(lam, gam, rep) * v - rep.J3).cwiseAbs().maxCoeff());
  }
  const double elapsed = watch.seconds();
  const bool pass = worst <= 1e-10 && elapsed < 5.0;
  report("criterion 2: V'IV = J3 on 1000 random angle pairs", pass,
         "max " + std::to_string(worst) + ", " + std::to_string(elapsed) + " s");
  CHECK(worst <= 1e-10);
  CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 3: invariant equation residual and its decay") {
  for (const RunConfig& cfg : {special_case_config(), sinusoidal_drive_config()}) {
    const int steps = static_cast<int>(std::lround((cfg.grid.t1 - cfg.grid.t0) / 1e-3));
    const double r1 = ode_residual_at(cfg, steps);
    const double r2 = ode_residual_at(cfg, 2 * steps);
    const double ratio = r1 / r2;
    const bool pass = r1 <= 1e-5 && ratio >= 3.5 && ratio <= 4.5;
    report("criterion 3: residual at h=1e-3 (" + std::to_string(cfg.label.two_j()) + "/2 spin)",
           pass, "residual " + std::to_string(r1) + ", ratio " + std::to_string(ratio));
    CHECK(r1 <= 1e-5);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("criterion 4: analytically solvable trajectory") {
  const RunConfig cfg = special_case_config();
  const SphericalSource src =
      make_spherical_source(cfg.detector, cfg.levels[0], cfg.label.n());
  const AuxiliaryTrajectory traj = integrate_auxiliary(src, 0.1, 0.0, cfg.grid);
  double worst = 0.0;
  for (int i = 0; i < cfg.grid.num_nodes(); ++i) {
    worst = std::max(worst, std::abs(traj.lambda(i) - (0.1 + cfg.grid.node(i))));
    worst = std::max(worst, std::abs(traj.gamma(i)));
  }
  report("criterion 4: lambda = 0.1 + t, gamma = 0 over [0,10]", worst <= 1e-8,
         "max deviation " + std::to_string(worst));
  CHECK(worst <= 1e-8);
}

TEST_CASE("criterion 5: oracle fidelity on the three named configs") {
  Stopwatch watch;
  const std::pair<const char*, RunConfig> cases[3] = {
      {"fixed point", fixed_point_config()},
      {"sinusoidal drive", sinusoidal_drive_config()},
      {"special case", special_case_config()},
  };
  bool all = true;
  std::ostringstream detail;
  for (const auto& [name, cfg] : cases) {
    const SU2Rep rep = build_rep(cfg.label.two_j());
    const BranchEvolution br = evolve_branch(cfg.detector, cfg.levels[0], cfg.label, 0, rep,
                                             cfg.grid, cfg.aux_init_for(0), cfg.initial_state,
                                             cfg.eps_sing);
    const StateSeq orc = direct_propagate(
        make_hamiltonian_source(cfg.detector, cfg.levels[0], cfg.label, rep), br.psi.front(),
        cfg.grid);
    const double fid = fidelity(br.psi, orc);
    detail << name << " deficit " << (1.0 - fid) << "; ";
    all = all && fid >= 1.0 - 1e-6;
    CHECK(fid >= 1.0 - 1e-6);
  }
  const double elapsed = watch.seconds();
  detail << elapsed << " s";
  report("criterion 5: assembled solution vs direct propagation", all && elapsed < 30.0,
         detail.str());
  CHECK(elapsed < 30.0);
}

TEST_CASE("criterion 6: cos^2j law across alpha and spins") {
  // same-axis pair: drive rates 2 and 0, shared start, so alpha(t) = t
  DetectorParams det{Schedule::constant(1.0), Schedule::constant(1.0)};
  LevelParams lk, ll;
  lk.E = Schedule::constant(0.0);
  lk.g.amplitude = Schedule::constant(1.0);  // c_k = 2
  lk.g.phase = Schedule::constant(-M_PI / 2);
  ll.E = Schedule::constant(0.0);
  ll.g.amplitude = Schedule::constant(0.0);  // c_l = 0
  ll.g.phase = Schedule::constant(0.0);
  const TimeGrid grid(0.0, 2 * M_PI * 63.0 / 64.0, 63);  // alpha = t over [0, 2pi)
  const AuxiliaryTrajectory ak =
      integrate_auxiliary(make_spherical_source(det, lk, 0.5), 0.1, 0.0, grid);
  const AuxiliaryTrajectory al =
      integrate_auxiliary(make_spherical_source(det, ll, 0.5), 0.1, 0.0, grid);
  double worst = 0.0;
  for (int two_j : {1, 2, 4, 10}) {
    const SU2Rep rep = build_rep(two_j);
    const MatrixSeq vk = build_V_sequence(beta_from_aux(ak), rep);
    const MatrixSeq vl = build_V_sequence(beta_from_aux(al), rep);
    const DecoherenceTrace direct = decoherence_direct(vk, vl, two_j, two_j, grid);
    for (int i = 0; i < grid.num_nodes(); ++i) {
      const double alpha = (ak.lambda(i) - al.lambda(i)) / 2;
      worst = std::max(worst, std::abs(direct.values(i) - special_case_factor(two_j, alpha)));
    }
  }
  // spot values for j = 1/2
  const SU2Rep rep1 = build_rep(1);
  const TimeGrid spot(0.0, M_PI / 2, 3);
  const AuxiliaryTrajectory sk =
      integrate_auxiliary(make_spherical_source(det, lk, 0.5), 0.1, 0.0, spot);
  const AuxiliaryTrajectory sl =
      integrate_auxiliary(make_spherical_source(det, ll, 0.5), 0.1, 0.0, spot);
  const DecoherenceTrace ds = decoherence_direct(build_V_sequence(beta_from_aux(sk), rep1),
                                                 build_V_sequence(beta_from_aux(sl), rep1), 1, 1,
                                                 spot);
  const double spot_zero = std::abs(ds.values(0) - 1.0);
  const double spot_third = std::abs(ds.values(2) - 0.5);  // alpha = pi/3
  const bool pass = worst <= 1e-8 && spot_zero <= 1e-8 && spot_third <= 1e-8;
  report("criterion 6: direct sandwich vs cos^2j over 64 alphas, j in {1/2,1,2,5}", pass,
         "max gap " + std::to_string(worst));
  CHECK(worst <= 1e-8);
  CHECK(spot_zero <= 1e-8);
  CHECK(spot_third <= 1e-8);
}

TEST_CASE("criterion 7: classical limit") {
  const double alpha = M_PI / 4;
  double prev = 2.0;
  bool decreasing = true;
  for (int two_j : {2, 10, 20, 50, 100}) {
    const double f = classical_limit_direct(two_j, alpha);
    if (!(f < prev)) decreasing = false;
    prev = f;
  }
  const double f50 = classical_limit_direct(100, alpha);
  const double law = classical_limit_scan(alpha, {100})[0];  // log-space evaluation
  const double ratio = f50 / law;
  const bool pass = f50 <= 1e-14 && ratio >= 0.5 && ratio <= 2.0 && decreasing;
  report("criterion 7: |F|(j=50) at alpha=pi/4 and monotone collapse", pass,
         "|F| = " + std::to_string(f50) + ", law ratio " + std::to_string(ratio));
  CHECK(f50 <= 1e-14);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2.0);
  CHECK(decreasing);
}

TEST_CASE("criterion 8: geometric phase solid angle") {
  const TimeGrid grid(0.0, 2 * M_PI, 4000);
  AuxiliaryTrajectory traj;
  traj.grid = grid;
  traj.lambda = RealVector::Constant(grid.num_nodes(), M_PI / 3);
  traj.gamma = RealVector::LinSpaced(grid.num_nodes(), 0.0, 2 * M_PI);
  traj.gamma_dot = RealVector::Ones(grid.num_nodes());
  const RealVector pg_half = geometric_phase(1, traj);
  const double err = std::abs(pg_half(grid.steps) - (-M_PI / 2));
  double lin = 0.0;
  for (int two_m : {-4, -3, -1, 2, 3, 4}) {
    const RealVector pg = geometric_phase(two_m, traj);
    lin = std::max(lin,
                   std::abs(pg(grid.steps) / (two_m / 2.0) - pg_half(grid.steps) / 0.5));
  }
  const bool pass = err <= 1e-6 && lin <= 1e-12;
  report("criterion 8: one-cycle phase -pi/2 and linearity in m", pass,
         "error " + std::to_string(err) + ", linearity " + std::to_string(lin));
  CHECK(err <= 1e-6);
  CHECK(lin <= 1e-12);
}

TEST_CASE("criterion 9: closed form vs direct sandwich") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> ugam(-M_PI, M_PI);
  double worst_collinear = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int two_j = 1 + (trial % 8);
    const SU2Rep rep = build_rep(two_j);
    const double gam = ugam(rng);
    const Complex axis(std::cos(gam), -std::sin(gam));
    const Complex bk = -std::abs(uni(rng)) * axis;
    const Complex bl = -std::abs(uni(rng)) * axis;
    const Matrix vk = su2_displacement(rep, bk);
    const Matrix vl = su2_displacement(rep, bl);
    for (int idx = 0; idx <= two_j; ++idx) {
      const int two_m = two_m_at(two_j, idx);
      const Complex direct = vk.col(idx).dot(vl.col(idx));
      worst_collinear =
          std::max(worst_collinear, std::abs(decoherence_closed(bk, bl, two_j, two_m) - direct));
    }
  }
  bool cubic_ok = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const int two_j = 1 + (trial % 4);  // j <= 2
    const SU2Rep rep = build_rep(two_j);
    const Complex bk = 0.05 * Complex(uni(rng), uni(rng)) / std::sqrt(2.0);
    const Complex bl = 0.05 * Complex(uni(rng), uni(rng)) / std::sqrt(2.0);
    const Matrix vk = su2_displacement(rep, bk);
    const Matrix vl = su2_displacement(rep, bl);
    const double cube = std::pow(std::max(std::abs(bk), std::abs(bl)), 3);
    for (int idx = 0; idx <= two_j; ++idx) {
      const int two_m = two_m_at(two_j, idx);
      const double gap =
          std::abs(decoherence_closed(bk, bl, two_j, two_m) - vk.col(idx).dot(vl.col(idx)));
      if (gap > 5.0 * cube) cubic_ok = false;
      if (cube > 0) worst_ratio = std::max(worst_ratio, gap / cube);
    }
  }
  const bool pass = worst_collinear <= 1e-10 && cubic_ok;
  report("criterion 9: collinear exactness and cubic bound", pass,
         "collinear " + std::to_string(worst_collinear) + ", gap/|beta|^3 max " +
             std::to_string(worst_ratio));
  CHECK(worst_collinear <= 1e-10);
  CHECK(cubic_ok);
}

TEST_CASE("criterion 10: verify exit codes and discrepancy artifact") {
  const fs::path dir = fs::temp_directory_path() / "cini_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const CliRun pristine = run_cli("verify --out " + (dir / "ok").string(), dir / "ok.log");
  CHECK(pristine.exit_code == 0);
  CHECK(pristine.output.find("FAIL") == std::string::npos);
  const bool artifact = fs::exists(dir / "ok" / "closed_vs_direct.csv") &&
                        fs::exists(dir / "ok" / "verify_report.json");
  CHECK(artifact);

  const CliRun flipped = run_cli(
      "verify --negative-control --out " + (dir / "neg").string(), dir / "neg.log");
  CHECK(flipped.exit_code == 3);
  const bool named = flipped.output.find("FAIL invariant_ode_residual") != std::string::npos &&
                     flipped.output.find("verification failed: invariant_ode_residual") !=
                         std::string::npos;
  CHECK(named);

  const bool pass = pristine.exit_code == 0 && artifact && flipped.exit_code == 3 && named;
  report("criterion 10: pristine verify exits 0; sign-flipped fixture exits 3 with named check",
         pass,
         "pristine " + std::to_string(pristine.exit_code) + ", flipped " +
             std::to_string(flipped.exit_code));
  fs::remove_all(dir);
}
