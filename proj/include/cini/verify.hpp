#ifndef CINI_VERIFY_HPP
#define CINI_VERIFY_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cini/config.hpp"

namespace cini {

/// Built-in configurations exercised by `verify` and the acceptance suite.
/// All use h = 1e-3 grids.
RunConfig fixed_point_config();       // constant parameters, aligned invariant start
RunConfig sinusoidal_drive_config();  // modulated coupling amplitude and phase
RunConfig special_case_config();      // equal mode frequencies, quarter-turn coupling phase

struct VerifyOptions {
  bool negative_control = false;  // run the sign-flipped auxiliary-rate fixture
  std::filesystem::path out_dir = "verify_out";
  std::optional<RunConfig> user_config;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Run every verification check, streaming one PASS/FAIL line per check to
/// `log`, and write verify_report.json plus the closed-vs-direct discrepancy
/// table under out_dir. Returns all results.
std::vector<CheckResult> run_verification(const VerifyOptions& options, std::ostream& log);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace cini

#endif  // CINI_VERIFY_HPP
