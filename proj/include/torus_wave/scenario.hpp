#pragma once

// Scenario assembly from a config file, end-to-end runs, and parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "torus_wave/config.hpp"
#include "torus_wave/constants.hpp"
#include "torus_wave/estimates.hpp"
#include "torus_wave/solver.hpp"
#include "torus_wave/source.hpp"
#include "torus_wave/verify.hpp"

namespace tw {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitBreakdown = 2, kExitConfig = 3 };

inline constexpr int kTimeseriesSchemaVersion = 1;

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  GridSpec grid{16};
  ModelParams params;
  SourceSpec source = SourceSpec::zero(GridSpec(16));
  Field u0{GridSpec(16)};
  Field u1{GridSpec(16)};
  SolverConfig solver;
  BootstrapParams bootstrap;
  CalibratedConstants constants;
  bool constants_calibrated_here = false;
  ConfigMap resolved;  // every key with its final value; re-running it reproduces the run
};

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<int> grid;
};

/// Every key the config schema accepts.
const std::set<std::string>& config_schema();

/// Throws ConfigError (including for unknown keys), ParameterError or DomainError.
Scenario build_scenario(ConfigMap config, const Overrides& overrides = {});

struct RunOutcome {
  int exit_code = kExitPass;
  std::string message;
  Trajectory trajectory;
  VerificationReport report;
};

/// Simulates and verifies; writes timeseries.csv, report.txt, report.csv and scenario.resolved.cfg when
/// `out_dir` is given.
RunOutcome run_scenario(const Scenario& scenario, const std::optional<std::filesystem::path>& out_dir);

/// Loads, builds and runs; configuration problems become exit code 3 with the message set.
RunOutcome run_config(const ConfigMap& config, const Overrides& overrides,
                      const std::optional<std::filesystem::path>& out_dir);

std::string timeseries_csv(const Trajectory& traj, const BootstrapParams& bp);

struct SweepAxis {
  std::string name;  // omega, k_eos, eps or energy
  std::vector<std::string> values;
};

/// Parses `name=v1,v2,...`.
SweepAxis parse_axis(const std::string& spec);

struct SweepPoint {
  std::vector<std::string> values;
  int exit_code = 0;
  std::optional<double> t_max_empirical;
  std::vector<CheckResult> results;
  std::string message;
};

/// One run per grid point in `<out>/point_NNN/`, plus `<out>/summary.csv`. Returns 0 when every point passes.
int run_sweep(const ConfigMap& config, const Overrides& overrides, const std::vector<SweepAxis>& axes,
              const std::filesystem::path& out_dir, int jobs, std::vector<SweepPoint>* points = nullptr);

}  // namespace tw
