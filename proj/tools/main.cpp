// torus-wave: run, sweep and calibrate from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "torus_wave/constants.hpp"
#include "torus_wave/error.hpp"
#include "torus_wave/scenario.hpp"

namespace {

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<int> grid;

  tw::Overrides overrides() const { return {seed, dt, grid}; }
};

void add_overrides(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Override the scenario seed");
  cmd->add_option("--dt", c.dt, "Override solver.dt");
  cmd->add_option("--grid", c.grid, "Override grid.n (points per axis)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped semilinear wave equation on the 3-torus: simulate and verify energy estimates"};
  app.require_subcommand(1);

  Common run_opts;
  std::string run_config;
  auto* run = app.add_subcommand("run", "Simulate one scenario and verify it");
  run->add_option("config", run_config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_opts.out, "Output directory")->default_val("out");
  add_overrides(run, run_opts);

  Common sweep_opts;
  std::string sweep_config;
  std::vector<std::string> axes;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over one or two parameter axes");
  sweep->add_option("config", sweep_config, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axes, "Axis as name=v1,v2,... with name in omega, k_eos, eps, energy")->required();
  sweep->add_option("--out", sweep_opts.out, "Output directory")->default_val("sweep-out");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_overrides(sweep, sweep_opts);

  int cal_grid = 16, cal_m = 3, cal_samples = tw::kDefaultCalibrationSamples;
  std::uint64_t cal_seed = tw::kDefaultCalibrationSeed;
  double cal_margin = 1.5;
  std::string cal_out;
  auto* cal = app.add_subcommand("calibrate", "Calibrate the Sobolev, product and composition constants");
  cal->add_option("--grid", cal_grid, "Points per axis")->default_val(16);
  cal->add_option("--m", cal_m, "Sobolev order")->default_val(3);
  cal->add_option("--seed", cal_seed, "Generator seed")->default_val(tw::kDefaultCalibrationSeed);
  cal->add_option("--samples", cal_samples, "Random fields per family")->default_val(tw::kDefaultCalibrationSamples);
  cal->add_option("--margin", cal_margin, "Safety factor applied to the observed maxima")->default_val(1.5);
  cal->add_option("--out", cal_out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const tw::RunOutcome o = tw::run_config(tw::ConfigMap::load(run_config), run_opts.overrides(), run_opts.out);
      std::cerr << o.message << "\n";
      if (o.exit_code != tw::kExitConfig) std::cout << tw::to_text(o.report);
      return o.exit_code;
    }
    if (*sweep) {
      std::vector<tw::SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(tw::parse_axis(a));
      const int code = tw::run_sweep(tw::ConfigMap::load(sweep_config), sweep_opts.overrides(), parsed, sweep_opts.out, jobs);
      std::cerr << "summary written to " << sweep_opts.out << "/summary.csv\n";
      return code;
    }
    if (*cal) {
      const auto c = tw::calibrate(tw::GridSpec(cal_grid), cal_m, cal_seed, cal_samples, cal_margin);
      if (cal_out.empty()) {
        std::cout << tw::to_text(c);
      } else {
        tw::save_constants(c, cal_out);
      }
      return 0;
    }
  } catch (const tw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return tw::kExitConfig;
  } catch (const tw::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return tw::kExitConfig;
  } catch (const tw::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return tw::kExitConfig;
  }
  return 0;
}
