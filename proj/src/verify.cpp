#include "cini/verify.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "cini/csv.hpp"
#include "cini/decoherence.hpp"
#include "cini/errors.hpp"
#include "cini/invariant.hpp"
#include "cini/oracle.hpp"
#include "cini/phases.hpp"

namespace cini {

namespace {

Vector ramp_state(int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(i + 1.0, 0.3 * i);
  v.normalize();
  return v;
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(4) << std::scientific << x;
  return ss.str();
}

}  // namespace

RunConfig fixed_point_config() {
  RunConfig cfg;
  cfg.label = SubspaceLabel(2, 0);
  cfg.detector.omega1 = Schedule::constant(1.4);
  cfg.detector.omega2 = Schedule::constant(0.4);
  LevelParams lvl;
  lvl.E = Schedule::constant(0.2);
  lvl.g.amplitude = Schedule::constant(0.3);
  lvl.g.phase = Schedule::constant(0.7);
  cfg.levels.push_back(lvl);
  cfg.grid = TimeGrid(0.0, 5.0, 5000);
  cfg.initial_state = ramp_state(3);
  cfg.aux_init = AlignedAuxInit{};
  cfg.decoherence_two_m = cfg.label.two_j();
  return cfg;
}

RunConfig sinusoidal_drive_config() {
  RunConfig cfg;
  cfg.label = SubspaceLabel(3, 1);
  cfg.detector.omega1 = Schedule::constant(1.5);
  cfg.detector.omega2 = Schedule::constant(0.7);
  LevelParams lvl;
  lvl.E = Schedule::linear(0.2, 0.1);
  lvl.g.amplitude =
      Schedule::sum({Schedule::constant(0.6), Schedule::cosine(0.25, 1.1, 0.3)});
  lvl.g.phase = Schedule::cosine(0.8, 0.9, 0.5);
  cfg.levels.push_back(lvl);
  cfg.grid = TimeGrid(0.0, 5.0, 5000);
  cfg.initial_state = ramp_state(5);
  cfg.aux_init = AlignedAuxInit{};
  cfg.decoherence_two_m = cfg.label.two_j();
  return cfg;
}

RunConfig special_case_config() {
  RunConfig cfg;
  cfg.label = SubspaceLabel(6, 0);
  cfg.detector.omega1 = Schedule::constant(1.0);
  cfg.detector.omega2 = Schedule::constant(1.0);
  LevelParams lvl;
  lvl.E = Schedule::constant(0.3);
  lvl.g.amplitude = Schedule::constant(0.5);  // c = 2|g| = 1
  lvl.g.phase = Schedule::constant(-M_PI / 2);
  cfg.levels.push_back(lvl);
  cfg.grid = TimeGrid(0.0, 10.0, 10000);
  cfg.initial_state = ramp_state(7);
  cfg.aux_init = std::vector<ExplicitAuxInit>{{0.1, 0.0}};
  cfg.decoherence_two_m = cfg.label.two_j();
  return cfg;
}

namespace {

CheckResult check_su2_commutators() {
  double worst = 0.0;
  for (int two_j = 1; two_j <= 20; ++two_j) {
    const SU2Rep rep = build_rep(two_j);
    worst = std::max(worst,
                     (commutator(rep.J3, rep.J_plus) - rep.J_plus).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (commutator(rep.J3, rep.J_minus) + rep.J_minus).cwiseAbs().maxCoeff());
    worst = std::max(
        worst, (commutator(rep.J_plus, rep.J_minus) - 2.0 * rep.J3).cwiseAbs().maxCoeff());
  }
  return {"su2_commutators", worst <= 1e-12, "max deviation " + fmt(worst)};
}

CheckResult check_displacement_unitarity() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int two_j = 1; two_j <= 20; ++two_j) {
    const SU2Rep rep = build_rep(two_j);
    for (int trial = 0; trial < 3; ++trial) {
      const Complex zeta(2.0 * uni(rng), 2.0 * uni(rng));
      const Matrix u = su2_displacement(rep, zeta);
      worst = std::max(worst, (u.adjoint() * u - Matrix::Identity(rep.dim, rep.dim))
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(worst, std::abs(std::abs(u.determinant()) - 1.0));
    }
  }
  return {"displacement_unitarity", worst <= 1e-12, "max deviation " + fmt(worst)};
}

CheckResult check_invariant_transform_identity() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ulam(0.0, M_PI);
  std::uniform_real_distribution<double> ugam(-M_PI, M_PI);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int two_j = 1 + (i % 8);  // j <= 4
    const SU2Rep rep = build_rep(two_j);
    const double lam = ulam(rng);
    const double gam = ugam(rng);
    const Complex beta = -(lam / 2) * Complex(std::cos(gam), -std::sin(gam));
    const Matrix v = build_V(beta, rep);
    const Matrix inv = invariant_matrix(lam, gam, rep);
    worst = std::max(worst, (v.adjoint() * inv * v - rep.J3).cwiseAbs().maxCoeff());
  }
  return {"invariant_transform_identity", worst <= 1e-10,
          "max ||V'IV - J3|| = " + fmt(worst) + " over 1000 samples"};
}

CheckResult check_special_case_trajectory() {
  const RunConfig cfg = special_case_config();
  const SphericalSource src = make_spherical_source(cfg.detector, cfg.levels[0], cfg.label.n());
  const AuxiliaryTrajectory traj = integrate_auxiliary(src, 0.1, 0.0, cfg.grid, cfg.eps_sing);
  double worst = 0.0;
  for (int i = 0; i < cfg.grid.num_nodes(); ++i) {
    worst = std::max(worst, std::abs(traj.lambda(i) - (0.1 + cfg.grid.node(i))));
    worst = std::max(worst, std::abs(traj.gamma(i)));
  }
  return {"special_case_trajectory", worst <= 1e-8,
          "max |lambda - (0.1+t)|, |gamma| = " + fmt(worst)};
}

double ode_residual(const RunConfig& cfg, int steps, bool flip_lambda_sign) {
  const SU2Rep rep = build_rep(cfg.label.two_j());
  const TimeGrid grid(cfg.grid.t0, cfg.grid.t1, steps);
  const SphericalSource src = make_spherical_source(cfg.detector, cfg.levels[0], cfg.label.n());
  double lambda0, gamma0;
  if (std::holds_alternative<AlignedAuxInit>(cfg.aux_init_for(0))) {
    lambda0 = src(grid.t0).theta;
    gamma0 = src(grid.t0).phi;
  } else {
    const auto e = std::get<ExplicitAuxInit>(cfg.aux_init_for(0));
    lambda0 = e.lambda0;
    gamma0 = e.gamma0;
  }
  AuxiliaryTrajectory traj;
  if (flip_lambda_sign) {
    const AuxiliaryRhs wrong = [&src](double t, double lam, double gam) {
      AuxiliaryRates r = auxiliary_rates(src(t), lam, gam);
      r.lambda_dot = -r.lambda_dot;
      return r;
    };
    traj = integrate_auxiliary_rhs(wrong, lambda0, gamma0, grid, cfg.eps_sing, true);
  } else {
    traj = integrate_auxiliary(src, lambda0, gamma0, grid, cfg.eps_sing);
  }
  MatrixSeq h_nodes;
  h_nodes.reserve(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i)
    h_nodes.push_back(hamiltonian_matrix(cfg.detector, cfg.levels[0], cfg.label, grid.node(i), rep));
  return check_invariant_ode(traj, h_nodes, rep);
}

CheckResult check_invariant_ode_residual(bool negative_control) {
  std::ostringstream detail;
  bool pass = true;
  const char* names[2] = {"special", "sinusoidal"};
  const RunConfig cfgs[2] = {special_case_config(), sinusoidal_drive_config()};
  for (int c = 0; c < 2; ++c) {
    const int steps = static_cast<int>(std::lround((cfgs[c].grid.t1 - cfgs[c].grid.t0) / 1e-3));
    try {
      const double r1 = ode_residual(cfgs[c], steps, negative_control);
      const double r2 = ode_residual(cfgs[c], 2 * steps, negative_control);
      const double ratio = r1 / r2;
      const bool ok = r1 <= 1e-5 && ratio >= 3.5 && ratio <= 4.5;
      pass = pass && ok;
      detail << names[c] << ": residual " << fmt(r1) << ", halving ratio "
             << std::setprecision(3) << ratio << "; ";
    } catch (const std::exception& e) {
      pass = false;
      detail << names[c] << ": " << e.what() << "; ";
    }
  }
  return {"invariant_ode_residual", pass, detail.str()};
}

double min_oracle_fidelity(const RunConfig& cfg) {
  const SU2Rep rep = build_rep(cfg.label.two_j());
  double min_fid = 1.0;
  for (size_t k = 0; k < cfg.levels.size(); ++k) {
    const BranchEvolution br =
        evolve_branch(cfg.detector, cfg.levels[k], cfg.label, static_cast<int>(k), rep, cfg.grid,
                      cfg.aux_init_for(static_cast<int>(k)), cfg.initial_state, cfg.eps_sing);
    const HamiltonianSource h = make_hamiltonian_source(cfg.detector, cfg.levels[k], cfg.label, rep);
    const StateSeq orc = direct_propagate(h, br.psi.front(), cfg.grid);
    min_fid = std::min(min_fid, fidelity(br.psi, orc));
  }
  return min_fid;
}

CheckResult check_oracle_fidelity(const std::string& name, const RunConfig& cfg) {
  try {
    const double fid = min_oracle_fidelity(cfg);
    return {name, fid >= 1.0 - 1e-6, "min fidelity deficit " + fmt(1.0 - fid)};
  } catch (const std::exception& e) {
    return {name, false, e.what()};
  }
}

// Same-axis branch pair built from the quarter-turn coupling phase: branch k
// has c_k = 2, branch l has g = 0, so alpha(t) = t.
struct SpecialPair {
  AuxiliaryTrajectory aux_k, aux_l;
};

SpecialPair special_pair(const TimeGrid& grid) {
  DetectorParams det{Schedule::constant(1.0), Schedule::constant(1.0)};
  LevelParams lk;
  lk.E = Schedule::constant(0.0);
  lk.g.amplitude = Schedule::constant(1.0);  // c_k = 2
  lk.g.phase = Schedule::constant(-M_PI / 2);
  LevelParams ll;
  ll.E = Schedule::constant(0.0);
  ll.g.amplitude = Schedule::constant(0.0);  // c_l = 0, degenerate branch
  ll.g.phase = Schedule::constant(0.0);
  SpecialPair p;
  p.aux_k = integrate_auxiliary(make_spherical_source(det, lk, 0.5), 0.1, 0.0, grid);
  p.aux_l = integrate_auxiliary(make_spherical_source(det, ll, 0.5), 0.1, 0.0, grid);
  return p;
}

double max_special_gap(const SpecialPair& p, int two_j, const TimeGrid& grid) {
  const SU2Rep rep = build_rep(two_j);
  const MatrixSeq vk = build_V_sequence(beta_from_aux(p.aux_k), rep);
  const MatrixSeq vl = build_V_sequence(beta_from_aux(p.aux_l), rep);
  const DecoherenceTrace direct = decoherence_direct(vk, vl, two_j, two_j, grid);
  double worst = 0.0;
  for (int i = 0; i < grid.num_nodes(); ++i) {
    const double alpha = (p.aux_k.lambda(i) - p.aux_l.lambda(i)) / 2;
    worst = std::max(worst, std::abs(direct.values(i) - special_case_factor(two_j, alpha)));
  }
  return worst;
}

CheckResult check_decoherence_special_case() {
  // 64 alpha values covering [0, 2pi)
  const TimeGrid grid(0.0, 2 * M_PI * 63.0 / 64.0, 63);
  const SpecialPair p = special_pair(grid);
  double worst = 0.0;
  for (int two_j : {1, 2, 4, 10}) worst = std::max(worst, max_special_gap(p, two_j, grid));

  // spot values at alpha = 0 and alpha = pi/3 for j = 1/2
  const TimeGrid spot_grid(0.0, M_PI / 2, 3);
  const SpecialPair sp = special_pair(spot_grid);
  const SU2Rep rep1 = build_rep(1);
  const DecoherenceTrace spot = decoherence_direct(
      build_V_sequence(beta_from_aux(sp.aux_k), rep1),
      build_V_sequence(beta_from_aux(sp.aux_l), rep1), 1, 1, spot_grid);
  const double gap0 = std::abs(spot.values(0) - 1.0);
  const double gap_third = std::abs(spot.values(2) - 0.5);  // alpha = pi/3
  worst = std::max({worst, gap0, gap_third});
  return {"decoherence_special_case", worst <= 1e-8, "max |direct - cos^2j| = " + fmt(worst)};
}

CheckResult check_classical_limit() {
  const double alpha = M_PI / 4;
  const std::vector<int> two_js{2, 10, 20, 50, 100};
  const std::vector<double> law = classical_limit_scan(alpha, two_js);
  bool pass = true;
  std::ostringstream detail;
  double prev = 2.0;
  for (size_t i = 0; i < two_js.size(); ++i) {
    const double direct = classical_limit_direct(two_js[i], alpha);
    if (!(direct < prev)) pass = false;
    prev = direct;
    const double ratio = direct / law[i];
    if (two_js[i] <= 50 ? std::abs(ratio - 1.0) > 1e-6 : (ratio < 0.5 || ratio > 2.0))
      pass = false;
  }
  const double f50 = classical_limit_direct(100, alpha);
  if (!(f50 <= 1e-14)) pass = false;
  detail << "|F|(j=50) = " << fmt(f50) << ", law " << fmt(law.back());
  return {"classical_limit", pass, detail.str()};
}

CheckResult check_geometric_phase_solid_angle() {
  const TimeGrid grid(0.0, 2 * M_PI, 4000);
  AuxiliaryTrajectory traj;
  traj.grid = grid;
  traj.lambda = RealVector::Constant(grid.num_nodes(), M_PI / 3);
  traj.gamma.resize(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i) traj.gamma(i) = grid.node(i);
  traj.gamma_dot = RealVector::Ones(grid.num_nodes());

  const RealVector pg_half = geometric_phase(1, traj);
  const double err = std::abs(pg_half(grid.steps) - (-M_PI / 2));
  double lin = 0.0;
  const RealVector base = geometric_phase(1, traj) * 2.0;  // phi_g / m for two_m = 1
  for (int two_m : {-3, -1, 2, 4}) {
    const RealVector pg = geometric_phase(two_m, traj);
    lin = std::max(lin, std::abs(pg(grid.steps) / (two_m / 2.0) - base(grid.steps)));
  }
  const double solid = std::abs(pg_half(grid.steps) + 0.5 * cyclic_solid_angle(M_PI / 3));
  const bool pass = err <= 1e-6 && lin <= 1e-12 && solid <= 1e-6;
  return {"geometric_phase_solid_angle", pass,
          "cycle error " + fmt(err) + ", linearity " + fmt(lin)};
}

CheckResult check_closed_form_collinear() {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ugam(-M_PI, M_PI);
  std::uniform_real_distribution<double> ur(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int two_j = 1 + (trial % 8);
    const SU2Rep rep = build_rep(two_j);
    const double gam = ugam(rng);
    const Complex axis(std::cos(gam), -std::sin(gam));
    const Complex bk = -ur(rng) / 2 * axis;
    const Complex bl = -ur(rng) / 2 * axis;
    const Matrix vk = su2_displacement(rep, bk);
    const Matrix vl = su2_displacement(rep, bl);
    for (int idx = 0; idx <= two_j; ++idx) {
      const int two_m = two_m_at(two_j, idx);
      const Complex direct = vk.col(idx).dot(vl.col(idx));
      worst = std::max(worst, std::abs(decoherence_closed(bk, bl, two_j, two_m) - direct));
    }
  }
  return {"closed_form_collinear", worst <= 1e-10, "max gap " + fmt(worst)};
}

double max_closed_gap_at_scale(std::mt19937& rng, double scale, double* max_ratio) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int two_j = 1 + (trial % 4);  // j <= 2
    const SU2Rep rep = build_rep(two_j);
    const Complex bk = scale * Complex(uni(rng), uni(rng)) / std::sqrt(2.0);
    const Complex bl = scale * Complex(uni(rng), uni(rng)) / std::sqrt(2.0);
    const Matrix vk = su2_displacement(rep, bk);
    const Matrix vl = su2_displacement(rep, bl);
    const double cube = std::pow(std::max(std::abs(bk), std::abs(bl)), 3);
    for (int idx = 0; idx <= two_j; ++idx) {
      const int two_m = two_m_at(two_j, idx);
      const Complex direct = vk.col(idx).dot(vl.col(idx));
      const double gap = std::abs(decoherence_closed(bk, bl, two_j, two_m) - direct);
      worst = std::max(worst, gap);
      if (max_ratio && cube > 0) *max_ratio = std::max(*max_ratio, gap / cube);
    }
  }
  return worst;
}

CheckResult check_closed_form_cubic_bound(const std::filesystem::path& out_dir) {
  std::mt19937 rng(23);
  double max_ratio = 0.0;
  max_closed_gap_at_scale(rng, 0.05, &max_ratio);
  const bool pass = max_ratio <= 5.0;

  // discrepancy-vs-scale artifact
  std::filesystem::create_directories(out_dir);
  CsvWriter w(out_dir / "closed_vs_direct.csv", {"beta_scale", "max_abs_gap", "cubic_bound"});
  for (double scale : {0.0125, 0.025, 0.05, 0.1, 0.2}) {
    const double gap = max_closed_gap_at_scale(rng, scale, nullptr);
    w.row({csv_num(scale), csv_num(gap), csv_num(5.0 * scale * scale * scale)});
  }
  return {"closed_form_cubic_bound", pass,
          "max |closed - direct| / max|beta|^3 = " + fmt(max_ratio) + " (bound 5)"};
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options, std::ostream& log) {
  std::vector<CheckResult> results;
  auto emit = [&](CheckResult r) {
    log << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    results.push_back(std::move(r));
  };

  emit(check_su2_commutators());
  emit(check_displacement_unitarity());
  emit(check_invariant_transform_identity());
  emit(check_special_case_trajectory());
  emit(check_invariant_ode_residual(options.negative_control));
  emit(check_oracle_fidelity("oracle_fidelity_fixed_point", fixed_point_config()));
  emit(check_oracle_fidelity("oracle_fidelity_sinusoidal", sinusoidal_drive_config()));
  emit(check_oracle_fidelity("oracle_fidelity_special_case", special_case_config()));
  emit(check_decoherence_special_case());
  emit(check_classical_limit());
  emit(check_geometric_phase_solid_angle());
  emit(check_closed_form_collinear());
  emit(check_closed_form_cubic_bound(options.out_dir));
  if (options.user_config)
    emit(check_oracle_fidelity("user_config_fidelity", *options.user_config));

  std::filesystem::create_directories(options.out_dir);
  std::ofstream report(options.out_dir / "verify_report.json");
  report << "[\n";
  for (size_t i = 0; i < results.size(); ++i) {
    report << "  {\"name\": \"" << results[i].name << "\", \"pass\": "
           << (results[i].pass ? "true" : "false") << "}";
    report << (i + 1 < results.size() ? ",\n" : "\n");
  }
  report << "]\n";
  return results;
}

}  // namespace cini
