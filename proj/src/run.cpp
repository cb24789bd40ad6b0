#include "cini/run.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <future>
#include <sstream>

#include "cini/csv.hpp"
#include "cini/decoherence.hpp"
#include "cini/errors.hpp"
#include "cini/invariant.hpp"
#include "cini/oracle.hpp"
#include "cini/phases.hpp"

namespace cini {

namespace {

namespace fs = std::filesystem;

void write_aux_csv(const fs::path& file, const AuxiliaryTrajectory& traj) {
  CsvWriter w(file, {"t", "lambda", "gamma", "gamma_dot"});
  for (int i = 0; i < traj.grid.num_nodes(); ++i)
    w.row({csv_num(traj.grid.node(i)), csv_num(traj.lambda(i)), csv_num(traj.gamma(i)),
           csv_num(traj.gamma_dot(i))});
}

void write_phase_csv(const fs::path& file, const PhaseTrace& pt) {
  CsvWriter w(file, {"t", "phi_dynamical", "phi_geometric", "phi_total"});
  for (int i = 0; i < pt.grid.num_nodes(); ++i)
    w.row({csv_num(pt.grid.node(i)), csv_num(pt.dynamical(i)), csv_num(pt.geometric(i)),
           csv_num(pt.dynamical(i) + pt.geometric(i))});
}

void write_state_csv(const fs::path& file, const TimeGrid& grid, const StateSeq& states) {
  std::vector<std::string> header{"t"};
  const Eigen::Index dim = states.front().size();
  for (Eigen::Index c = 0; c < dim; ++c) {
    header.push_back("re_" + std::to_string(c));
    header.push_back("im_" + std::to_string(c));
  }
  CsvWriter w(file, header);
  for (int i = 0; i < grid.num_nodes(); ++i) {
    std::vector<std::string> cells{csv_num(grid.node(i))};
    for (Eigen::Index c = 0; c < dim; ++c) {
      cells.push_back(csv_num(states[i](c).real()));
      cells.push_back(csv_num(states[i](c).imag()));
    }
    w.row(cells);
  }
}

void write_decoherence_csv(const fs::path& file, const DecoherenceTrace& tr) {
  CsvWriter w(file, {"t", "re_F", "im_F", "abs_F", "method"});
  const std::string tag = to_string(tr.method);
  for (int i = 0; i < tr.grid.num_nodes(); ++i)
    w.row({csv_num(tr.grid.node(i)), csv_num(tr.values(i).real()), csv_num(tr.values(i).imag()),
           csv_num(std::abs(tr.values(i))), tag});
}

struct BranchKinematics {
  std::vector<SphericalParams> spherical;
  AuxiliaryTrajectory aux;
  DisplacementParams displacement;
  MatrixSeq v_seq;
};

// Angles, displacement, and V samples only; no state assembly.
BranchKinematics branch_kinematics(const RunConfig& cfg, int level, const SU2Rep& rep) {
  BranchKinematics bk;
  const SphericalSource source =
      make_spherical_source(cfg.detector, cfg.levels[level], cfg.label.n());
  bk.spherical.reserve(cfg.grid.num_nodes());
  for (int i = 0; i < cfg.grid.num_nodes(); ++i) bk.spherical.push_back(source(cfg.grid.node(i)));
  double lambda0, gamma0;
  const AuxInit init = cfg.aux_init_for(level);
  if (std::holds_alternative<AlignedAuxInit>(init)) {
    lambda0 = bk.spherical.front().theta;
    gamma0 = bk.spherical.front().phi;
  } else {
    lambda0 = std::get<ExplicitAuxInit>(init).lambda0;
    gamma0 = std::get<ExplicitAuxInit>(init).gamma0;
  }
  bk.aux = integrate_auxiliary(source, lambda0, gamma0, cfg.grid, cfg.eps_sing);
  bk.displacement = beta_from_aux(bk.aux);
  bk.v_seq = build_V_sequence(bk.displacement, rep);
  return bk;
}

}  // namespace

std::vector<LevelSummary> run_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const SU2Rep rep = build_rep(cfg.label.two_j());
  std::vector<LevelSummary> summaries;

  for (size_t k = 0; k < cfg.levels.size(); ++k) {
    const BranchEvolution br = evolve_branch(cfg.detector, cfg.levels[k], cfg.label,
                                             static_cast<int>(k), rep, cfg.grid,
                                             cfg.aux_init_for(static_cast<int>(k)),
                                             cfg.initial_state, cfg.eps_sing);
    const std::string suffix = "_k" + std::to_string(k);
    if (cfg.has_task(Task::aux)) write_aux_csv(out_dir / ("aux" + suffix + ".csv"), br.aux);
    if (cfg.has_task(Task::phases)) {
      for (const PhaseTrace& pt : br.phases)
        write_phase_csv(out_dir / ("phases" + suffix + "_m" + std::to_string(pt.two_m) + ".csv"),
                        pt);
    }
    if (cfg.has_task(Task::state))
      write_state_csv(out_dir / ("state" + suffix + ".csv"), cfg.grid, br.psi);
    if (cfg.has_task(Task::fidelity)) {
      const HamiltonianSource h = make_hamiltonian_source(cfg.detector, cfg.levels[k], cfg.label, rep);
      const StateSeq orc = direct_propagate(h, br.psi.front(), cfg.grid);
      write_state_csv(out_dir / ("oracle" + suffix + ".csv"), cfg.grid, orc);
      LevelSummary ls;
      ls.level_k = static_cast<int>(k);
      ls.min_fidelity = fidelity(br.psi, orc);
      ls.max_transform_dev = check_transformed_invariant(br.aux, rep);
      ls.degenerate = br.aux.degenerate;
      summaries.push_back(ls);
    }
  }

  if (!summaries.empty()) {
    CsvWriter w(out_dir / "summary.csv", {"k", "min_fidelity", "max_transform_dev", "degenerate"});
    for (const auto& ls : summaries)
      w.row({std::to_string(ls.level_k), csv_num(ls.min_fidelity), csv_num(ls.max_transform_dev),
             ls.degenerate ? "1" : "0"});
  }
  return summaries;
}

DecohereSummary run_decohere(const RunConfig& cfg, int k, int l, const fs::path& out_dir) {
  const int nlev = static_cast<int>(cfg.levels.size());
  if (k < 0 || l < 0 || k >= nlev || l >= nlev)
    throw ConfigError("decohere: level indices out of range (have " + std::to_string(nlev) +
                      " levels)");
  fs::create_directories(out_dir);
  const int two_j = cfg.label.two_j();
  const int two_m = cfg.decoherence_two_m;
  const SU2Rep rep = build_rep(two_j);

  const BranchKinematics bk = branch_kinematics(cfg, k, rep);
  const BranchKinematics bl = branch_kinematics(cfg, l, rep);

  const std::string suffix = "_k" + std::to_string(k) + "_l" + std::to_string(l);
  const DecoherenceTrace direct =
      decoherence_direct(bk.v_seq, bl.v_seq, two_j, two_m, cfg.grid, k, l);
  const DecoherenceTrace closed =
      decoherence_closed_trace(bk.displacement, bl.displacement, two_j, two_m, cfg.grid, k, l);
  write_decoherence_csv(out_dir / ("decoherence" + suffix + "_direct.csv"), direct);
  write_decoherence_csv(out_dir / ("decoherence" + suffix + "_closed.csv"), closed);

  DecohereSummary summary;
  summary.max_direct_closed_gap = (direct.values - closed.values).cwiseAbs().maxCoeff();

  // Same-axis pair with the detector stretched along m = j: emit the
  // cos^{2j}(alpha) law with alpha = (lambda_k - lambda_l)/2.
  const bool same_axis = bk.aux.gamma_dot.cwiseAbs().maxCoeff() <= 1e-10 &&
                         bl.aux.gamma_dot.cwiseAbs().maxCoeff() <= 1e-10 &&
                         (bk.aux.gamma - bl.aux.gamma).cwiseAbs().maxCoeff() <= 1e-10;
  if (same_axis && two_m == two_j) {
    DecoherenceTrace special;
    special.grid = cfg.grid;
    special.two_j = two_j;
    special.two_m = two_m;
    special.branch_k = k;
    special.branch_l = l;
    special.method = DecoherenceMethod::special_case;
    special.values.resize(cfg.grid.num_nodes());
    for (int i = 0; i < cfg.grid.num_nodes(); ++i) {
      const double alpha = (bk.aux.lambda(i) - bl.aux.lambda(i)) / 2;
      special.values(i) = special_case_factor(two_j, alpha);
    }
    write_decoherence_csv(out_dir / ("decoherence" + suffix + "_special.csv"), special);
    summary.special_case_emitted = true;
  }
  return summary;
}

namespace {

RunConfig apply_axis(const RunConfig& base, const std::string& axis, double value) {
  RunConfig cfg = base;
  if (axis == "two_j") {
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-9 || rounded < 0)
      throw ConfigError("sweep: two_j values must be nonnegative integers");
    const int two_j = static_cast<int>(rounded);
    cfg.label = SubspaceLabel(two_j, 0);
    cfg.initial_state = AlignedInitialState{two_j};
    cfg.decoherence_two_m = two_j;
    return cfg;
  }
  Schedule* target = nullptr;
  if (axis == "detector.omega1") target = &cfg.detector.omega1;
  else if (axis == "detector.omega2") target = &cfg.detector.omega2;
  else if (axis.rfind("levels.", 0) == 0) {
    const size_t dot = axis.find('.', 7);
    if (dot == std::string::npos) throw ConfigError("sweep: bad axis '" + axis + "'");
    int idx = -1;
    try {
      idx = std::stoi(axis.substr(7, dot - 7));
    } catch (...) {
      throw ConfigError("sweep: bad level index in axis '" + axis + "'");
    }
    if (idx < 0 || idx >= static_cast<int>(cfg.levels.size()))
      throw ConfigError("sweep: level index out of range in axis '" + axis + "'");
    const std::string field = axis.substr(dot + 1);
    if (field == "E") target = &cfg.levels[idx].E;
    else if (field == "g.amplitude") target = &cfg.levels[idx].g.amplitude;
    else if (field == "g.phase") target = &cfg.levels[idx].g.phase;
    else throw ConfigError("sweep: unknown level field '" + field + "'");
  } else {
    throw ConfigError("sweep: unknown axis '" + axis + "'");
  }
  *target = Schedule::constant(value);
  return cfg;
}

SweepRow sweep_row(const RunConfig& cfg, double value) {
  const int two_j = cfg.label.two_j();
  const SU2Rep rep = build_rep(two_j);
  SweepRow row;
  row.value = value;

  double min_fid = 1.0;
  double max_resid = 0.0;
  std::vector<BranchKinematics> kin;
  for (int k = 0; k < 2; ++k) {
    const BranchEvolution br = evolve_branch(cfg.detector, cfg.levels[k], cfg.label, k, rep,
                                             cfg.grid, cfg.aux_init_for(k), cfg.initial_state,
                                             cfg.eps_sing);
    const HamiltonianSource h = make_hamiltonian_source(cfg.detector, cfg.levels[k], cfg.label, rep);
    const StateSeq orc = direct_propagate(h, br.psi.front(), cfg.grid);
    min_fid = std::min(min_fid, fidelity(br.psi, orc));
    MatrixSeq h_nodes;
    h_nodes.reserve(cfg.grid.num_nodes());
    for (int i = 0; i < cfg.grid.num_nodes(); ++i) h_nodes.push_back(h(cfg.grid.node(i)));
    max_resid = std::max(max_resid, check_invariant_ode(br.aux, h_nodes, rep));
    kin.push_back(BranchKinematics{br.spherical, br.aux, br.displacement, br.v_seq});
  }
  const int two_m = cfg.decoherence_two_m;
  const DecoherenceTrace direct =
      decoherence_direct(kin[0].v_seq, kin[1].v_seq, two_j, two_m, cfg.grid, 0, 1);
  const Complex closed_terminal =
      decoherence_closed(kin[0].displacement.beta(cfg.grid.steps),
                         kin[1].displacement.beta(cfg.grid.steps), two_j, two_m);
  row.terminal_abs_f_direct = std::abs(direct.values(cfg.grid.steps));
  row.terminal_abs_f_closed = std::abs(closed_terminal);
  row.min_fidelity = min_fid;
  row.max_ode_residual = max_resid;
  return row;
}

}  // namespace

SweepSummary run_sweep(const RunConfig& cfg, const std::string& axis,
                       const std::vector<double>& values, const fs::path& out_dir) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  if (cfg.levels.size() < 2) throw ConfigError("sweep: config needs at least two levels");
  fs::create_directories(out_dir);

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(values.size());
  for (double v : values) {
    RunConfig modified = apply_axis(cfg, axis, v);
    futures.push_back(std::async(std::launch::async,
                                 [modified = std::move(modified), v]() { return sweep_row(modified, v); }));
  }
  SweepSummary summary;
  summary.rows.reserve(values.size());
  for (auto& f : futures) summary.rows.push_back(f.get());

  summary.monotone_decreasing = summary.rows.size() > 1;
  for (size_t i = 1; i < summary.rows.size(); ++i)
    if (!(summary.rows[i].terminal_abs_f_direct < summary.rows[i - 1].terminal_abs_f_direct))
      summary.monotone_decreasing = false;

  CsvWriter w(out_dir / "sweep.csv",
              {"value", "terminal_abs_F_direct", "terminal_abs_F_closed", "min_fidelity",
               "max_ode_residual"});
  for (const auto& r : summary.rows)
    w.row({csv_num(r.value), csv_num(r.terminal_abs_f_direct), csv_num(r.terminal_abs_f_closed),
           csv_num(r.min_fidelity), csv_num(r.max_ode_residual)});
  return summary;
}

void write_run_metadata(const std::filesystem::path& out_dir, const std::string& command) {
  std::filesystem::create_directories(out_dir);
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream out(out_dir / "run_meta.json");
  out << "{\n  \"timestamp\": \"" << stamp << "\",\n  \"command\": \"" << command << "\"\n}\n";
}

}  // namespace cini
