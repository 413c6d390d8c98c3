#pragma once

// Trajectory checks for the energy, bootstrap and asymptotic inequalities.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torus_wave/constants.hpp"
#include "torus_wave/estimates.hpp"
#include "torus_wave/solver.hpp"

namespace tw {

struct CheckResult {
  std::string check_id;
  bool passed = true;
  bool skipped = false;
  double worst_margin = 0.0;  // min over samples of (RHS - LHS) / scale
  double worst_time = 0.0;
  double tolerance_used = 0.0;
  std::string note;  // skip reason or observations
};

struct VerificationReport {
  std::string scenario;
  ModelParams params;
  BootstrapParams bootstrap;
  double source_amplitude = 0.0;
  std::vector<CheckResult> results;
  std::optional<double> c0_estimate;
  std::optional<double> t_max_empirical;
  std::optional<double> c_delta_measured;

  /// True when no check failed (skipped checks do not count against it).
  bool all_passed() const;
};

/// Everything a check may consult besides the trajectory.
struct CheckContext {
  BootstrapParams bootstrap;
  CalibratedConstants constants;
};

CheckResult check_energy_differential(const Trajectory& traj);
CheckResult check_energy_integral(const Trajectory& traj);
/// Also reports the first sample time at which the bootstrap inequality fails.
CheckResult check_bootstrap(const Trajectory& traj, const BootstrapParams& bp, std::optional<double>* t_max = nullptr);
CheckResult check_bootstrap_step1(const Trajectory& traj, const BootstrapParams& bp);
CheckResult check_improved_estimates(const Trajectory& traj, const BootstrapParams& bp);
CheckResult check_mean_mode(const Trajectory& traj, const BootstrapParams& bp);
/// max_t |recorded mean(u) - quadrature reference| (zero-mean data only).
double mean_mode_discrepancy(const Trajectory& traj);
CheckResult check_asymptotics(const Trajectory& traj, std::optional<double>* c0 = nullptr);
CheckResult check_source_bound(const Trajectory& traj, const BootstrapParams& bp,
                               std::optional<double>* measured = nullptr);
CheckResult check_energy_norm_bound(const Trajectory& traj);
CheckResult check_wirtinger_final(const Trajectory& traj);
CheckResult check_algebra_final(const Trajectory& traj, const CalibratedConstants& constants);

/// Identifiers of every registered check, in report order.
const std::vector<std::string>& registered_checks();

/// Runs every registered check concurrently; the result order is fixed.
VerificationReport run_all(const Trajectory& traj, const CheckContext& ctx, const std::string& scenario = "");

/// One record per check: check_id, passed, skipped, worst_margin, worst_time, tolerance, note.
std::string to_text(const VerificationReport& report);
std::string to_csv(const VerificationReport& report);

}  // namespace tw
