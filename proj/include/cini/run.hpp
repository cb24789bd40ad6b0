#ifndef CINI_RUN_HPP
#define CINI_RUN_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cini/config.hpp"
#include "cini/types.hpp"

namespace cini {

/// Per-level result summary from a simulate run.
struct LevelSummary {
  int level_k = 0;
  double min_fidelity = 0.0;
  double max_transform_dev = 0.0;
  bool degenerate = false;
};

/// Evolve every level of the config, write the requested CSVs under out_dir,
/// and return per-level oracle-fidelity summaries. Throws on numerical
/// breakdown (SingularityError / NonFiniteError).
std::vector<LevelSummary> run_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir);

struct DecohereSummary {
  double max_direct_closed_gap = 0.0;  // max |direct - closed| over the grid
  bool special_case_emitted = false;
};

/// Decoherence factor for the branch pair (k, l): direct and closed-form
/// traces, plus the same-axis cos^{2j} curve when the pair qualifies.
DecohereSummary run_decohere(const RunConfig& cfg, int k, int l,
                             const std::filesystem::path& out_dir);

struct SweepRow {
  double value = 0.0;
  double terminal_abs_f_direct = 0.0;
  double terminal_abs_f_closed = 0.0;
  double min_fidelity = 0.0;
  double max_ode_residual = 0.0;
};

struct SweepSummary {
  std::vector<SweepRow> rows;  // input order
  bool monotone_decreasing = false;
};

/// Sweep one axis ("two_j" or a schedule scalar path such as
/// "detector.omega1" or "levels.0.g.amplitude") across the given values.
/// Rows execute concurrently; output order is deterministic.
SweepSummary run_sweep(const RunConfig& cfg, const std::string& axis,
                       const std::vector<double>& values, const std::filesystem::path& out_dir);

/// Sidecar metadata (ISO-8601 timestamp, command line) written next to the
/// CSVs; never inside them.
void write_run_metadata(const std::filesystem::path& out_dir, const std::string& command);

}  // namespace cini

#endif  // CINI_RUN_HPP
