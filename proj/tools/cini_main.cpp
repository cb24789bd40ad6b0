#include <exception>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cini/config.hpp"
#include "cini/errors.hpp"
#include "cini/run.hpp"
#include "cini/verify.hpp"

namespace {

// 0 success, 1 usage/config error, 2 numerical breakdown, 3 verification failure
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerifyFailed = 3;

std::string join_args(int argc, char** argv) {
  std::ostringstream ss;
  for (int i = 0; i < argc; ++i) ss << (i ? " " : "") << argv[i];
  return ss.str();
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-dependent generalized Cini model: invariant solutions, phases, decoherence"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", axis, values_csv;
  int level_k = 0, level_l = 1;
  bool negative_control = false;

  CLI::App* simulate = app.add_subcommand("simulate", "evolve every level and check against direct propagation");
  simulate->add_option("--config", config_path, "JSON config file")->required();
  simulate->add_option("--out", out_dir, "output directory");

  CLI::App* decohere = app.add_subcommand("decohere", "decoherence factor for a branch pair");
  decohere->add_option("--config", config_path, "JSON config file")->required();
  decohere->add_option("--k", level_k, "first level index")->required();
  decohere->add_option("--l", level_l, "second level index")->required();
  decohere->add_option("--out", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "scan one axis across a value list");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--axis", axis, "two_j | detector.omega1 | detector.omega2 | levels.<k>.E | levels.<k>.g.amplitude | levels.<k>.g.phase")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  sweep->add_option("--out", out_dir, "output directory");

  CLI::App* verify = app.add_subcommand("verify", "run the built-in verification suite");
  verify->add_option("--config", config_path, "additional config to check");
  verify->add_option("--out", out_dir, "artifact directory")->default_val("verify_out");
  verify->add_flag("--negative-control", negative_control,
                   "corrupt the auxiliary rates (sign flip) to prove the suite catches it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      const cini::RunConfig cfg = cini::load_config_file(config_path);
      const auto summaries = cini::run_simulate(cfg, out_dir);
      cini::write_run_metadata(out_dir, join_args(argc, argv));
      for (const auto& s : summaries)
        std::cout << "level " << s.level_k << ": min fidelity " << std::setprecision(15)
                  << s.min_fidelity << (s.degenerate ? " (degenerate branch)" : "") << "\n";
      return kExitOk;
    }
    if (decohere->parsed()) {
      const cini::RunConfig cfg = cini::load_config_file(config_path);
      const auto summary = cini::run_decohere(cfg, level_k, level_l, out_dir);
      cini::write_run_metadata(out_dir, join_args(argc, argv));
      std::cout << "max |direct - closed| = " << summary.max_direct_closed_gap << "\n";
      if (summary.special_case_emitted)
        std::cout << "same-axis pair: cos^2j curve emitted\n";
      return kExitOk;
    }
    if (sweep->parsed()) {
      const cini::RunConfig cfg = cini::load_config_file(config_path);
      const auto values = parse_values(values_csv);
      const auto summary = cini::run_sweep(cfg, axis, values, out_dir);
      cini::write_run_metadata(out_dir, join_args(argc, argv));
      std::cout << "rows: " << summary.rows.size() << ", |F| monotone decreasing: "
                << (summary.monotone_decreasing ? "true" : "false") << "\n";
      return kExitOk;
    }
    if (verify->parsed()) {
      cini::VerifyOptions options;
      options.negative_control = negative_control;
      options.out_dir = out_dir;
      if (!config_path.empty()) options.user_config = cini::load_config_file(config_path);
      const auto results = cini::run_verification(options, std::cout);
      if (cini::all_passed(results)) {
        std::cout << "all checks passed\n";
        return kExitOk;
      }
      for (const auto& r : results)
        if (!r.pass) std::cout << "verification failed: " << r.name << "\n";
      return kExitVerifyFailed;
    }
  } catch (const cini::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cini::SingularityError& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cini::NonFiniteError& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cini::NonHermitianError& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
