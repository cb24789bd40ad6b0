#ifndef CINI_CONFIG_HPP
#define CINI_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cini/model.hpp"
#include "cini/phases.hpp"
#include "cini/types.hpp"

namespace cini {

enum class Task { aux, phases, state, fidelity };

/// One validated run description: subspace label, per-level schedules,
/// detector frequencies, grid, initial conditions, and task selection.
struct RunConfig {
  SubspaceLabel label;
  std::vector<LevelParams> levels;
  DetectorParams detector;
  TimeGrid grid;
  InitialState initial_state;                  // defaults to aligned |j,j>
  std::variant<AlignedAuxInit, std::vector<ExplicitAuxInit>> aux_init;  // per level when explicit
  double eps_sing = 1e-9;
  std::vector<Task> tasks;                     // defaults to all
  std::string output_dir = "out";
  int decoherence_two_m;                       // detector weight for F, defaults to 2j
  std::optional<Vector> amplitudes;            // branch amplitudes c_{n,k}

  bool has_task(Task t) const;
  AuxInit aux_init_for(int level) const;
};

/// Parse and validate a JSON document. Defaults are filled, unknown and
/// duplicate keys are rejected, and every error message names the offending
/// path (e.g. "grid.steps"). Throws ConfigError.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config_file(const std::filesystem::path& file);

}  // namespace cini

#endif  // CINI_CONFIG_HPP
