#include "torus_wave/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "torus_wave/energy.hpp"
#include "torus_wave/error.hpp"
#include "torus_wave/random_fields.hpp"

namespace tw {

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
  }
  return out;
}

MultiIndex parse_mode(const std::string& text, const std::string& key) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("config key '" + key + "': expected three integers 'n1,n2,n3'");
  MultiIndex mode{};
  for (int d = 0; d < 3; ++d) mode[d] = static_cast<int>(parse_number(parts[d], key));
  return mode;
}

Field cosine_mode(const GridSpec& g, const MultiIndex& n) {
  return Field::from_function(g, [&](double x, double y, double z) { return std::cos(n[0] * x + n[1] * y + n[2] * z); });
}

/// Entries `n1 n2 n3 re im` separated by ';'; each adds c e^{in.x} + conj(c) e^{-in.x}.
Field coefficient_field(const GridSpec& g, const std::string& text, const std::string& key) {
  Spectrum s(g);
  for (const auto& entry : split(text, ';')) {
    if (entry.empty()) continue;
    std::istringstream in(entry);
    int n1, n2, n3;
    double re, im;
    if (!(in >> n1 >> n2 >> n3 >> re >> im)) {
      throw ConfigError("config key '" + key + "': entries must read 'n1 n2 n3 re im'");
    }
    const int half = g.n() / 2;
    for (int v : {n1, n2, n3}) {
      if (std::abs(v) >= half) throw ConfigError("config key '" + key + "': wave number beyond the grid's Nyquist limit");
    }
    const Complex c(re, im);
    s.at(n1, n2, n3) += c;
    s.at(-n1, -n2, -n3) += std::conj(c);
  }
  return inverse_transform(s);
}

Field gaussian_bump(const GridSpec& g, double width) {
  Field b = Field::from_function(g, [&](double x, double y, double z) {
    const double pi = std::numbers::pi;
    const double r2 = (x - pi) * (x - pi) + (y - pi) * (y - pi) + (z - pi) * (z - pi);
    return std::exp(-r2 / (2.0 * width * width));
  });
  return mean_decompose(b).oscillatory;
}

struct InitialData {
  Field u0, u1;
};

InitialData build_initial(const ConfigMap& c, const GridSpec& g, std::uint64_t seed, const ModelParams& params) {
  const std::string preset = c.get_or("initial.preset", "zero");
  const double s0 = c.number_or("initial.u0_scale", 0.0);
  const double s1 = c.number_or("initial.u1_scale", 1.0);
  InitialData d{Field(g), Field(g)};
  if (preset == "zero") {
  } else if (preset == "single-mode") {
    const Field shape = cosine_mode(g, parse_mode(c.get_or("initial.mode", "1,0,0"), "initial.mode"));
    d.u0 = s0 * shape;
    d.u1 = s1 * shape;
  } else if (preset == "gaussian") {
    const double width = c.number_or("initial.width", 0.8);
    if (!(width > 0.0)) throw ConfigError("config key 'initial.width' must be > 0");
    const Field shape = gaussian_bump(g, width);
    d.u0 = s0 * shape;
    d.u1 = s1 * shape;
  } else if (preset == "random") {
    std::mt19937_64 rng(seed);
    RandomFieldOptions opt;
    opt.max_wavenumber = std::min(3, g.n() / 2 - 1);
    opt.zero_mean = true;
    opt.target_sup = 1.0;
    const Field r0 = random_band_limited_field(g, rng, opt);
    const Field r1 = random_band_limited_field(g, rng, opt);
    d.u0 = s0 * r0;
    d.u1 = s1 * r1;
  } else if (preset == "coefficients") {
    d.u0 = coefficient_field(g, c.get_or("initial.u0_coefficients", ""), "initial.u0_coefficients");
    d.u1 = coefficient_field(g, c.get_or("initial.u1_coefficients", ""), "initial.u1_coefficients");
  } else {
    throw ConfigError("config key 'initial.preset': unknown preset '" + preset +
                      "' (expected zero, single-mode, gaussian, random or coefficients)");
  }
  const double mean0 = c.number_or("initial.u0_mean", 0.0);
  const double mean1 = c.number_or("initial.u1_mean", 0.0);
  if (c.has("initial.energy")) {
    const double target = c.number("initial.energy");
    if (!(target >= 0.0)) throw ConfigError("config key 'initial.energy' must be >= 0");
    if (mean0 != 0.0 || mean1 != 0.0) throw ConfigError("config key 'initial.energy' requires zero-mean data");
    const double current = std::sqrt(modified_energy(d.u0, d.u1, params.omega, params.m));
    if (!(current > 0.0)) throw ConfigError("config key 'initial.energy': the chosen preset has zero energy");
    d.u0 *= target / current;
    d.u1 *= target / current;
  }
  for (double& v : d.u0.values) v += mean0;
  for (double& v : d.u1.values) v += mean1;
  return d;
}

FluidPotential preset_potential(const GridSpec& g, double phi_t, double beta) {
  // phi = phi_t t + beta sin(x1) sin(x2)
  FluidPotential p{Field::constant(g, phi_t), {Field(g), Field(g), Field(g)}};
  p.phi_grad[0] = Field::from_function(g, [&](double x, double y, double) { return beta * std::cos(x) * std::sin(y); });
  p.phi_grad[1] = Field::from_function(g, [&](double x, double y, double) { return beta * std::sin(x) * std::cos(y); });
  return p;
}

TimeProfile parse_profile(const std::string& s) {
  if (s == "steady") return TimeProfile::steady;
  if (s == "cosine") return TimeProfile::cosine;
  if (s == "exp") return TimeProfile::exponential;
  throw ConfigError("config key 'source.time_profile': expected steady, cosine or exp, got '" + s + "'");
}

double auto_or_number(const ConfigMap& c, const std::string& key, double automatic) {
  const std::string v = c.get_or(key, "auto");
  return v == "auto" ? automatic : parse_number(v, key);
}

std::string fmt_breakdown(const Trajectory::Breakdown& b) {
  return "breakdown at t = " + num(b.t) + " (step " + std::to_string(b.step) + "): " + b.reason;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

const std::set<std::string>& config_schema() {
  static const std::set<std::string> keys = {
      "name", "seed", "generator", "grid.n",
      "model.omega", "model.k_eos", "model.kappa", "model.mu", "model.m",
      "source.preset", "source.amplitude", "source.time_profile", "source.time_rate", "source.beta",
      "source.phi_t", "source.mode",
      "initial.preset", "initial.u0_scale", "initial.u1_scale", "initial.mode", "initial.width",
      "initial.u0_coefficients", "initial.u1_coefficients", "initial.energy", "initial.u0_mean",
      "initial.u1_mean",
      "solver.dt", "solver.t_end", "solver.sample_every", "solver.dealias",
      "bootstrap.t1", "bootstrap.eps_prime", "bootstrap.delta", "bootstrap.delta_prime",
      "constants.file", "constants.seed", "constants.samples"};
  return keys;
}

Scenario build_scenario(ConfigMap c, const Overrides& overrides) {
  if (overrides.seed) c.set("seed", std::to_string(*overrides.seed));
  if (overrides.dt) c.set("solver.dt", num(*overrides.dt));
  if (overrides.grid) c.set("grid.n", std::to_string(*overrides.grid));
  if (const auto unknown = c.unknown_keys(config_schema()); !unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config keys: " + list);
  }

  Scenario sc;
  sc.name = c.get_or("name", "scenario");
  const long long seed = c.integer_or("seed", 1);
  if (seed < 0) throw ConfigError("config key 'seed' must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  if (const auto gen = c.get("generator"); gen && *gen != kGeneratorName) {
    throw ConfigError("config key 'generator': only " + std::string(kGeneratorName) + " is available, got '" + *gen + "'");
  }
  try {
    sc.grid = GridSpec(static_cast<int>(c.integer_or("grid.n", 16)));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config key 'grid.n': ") + e.what());
  }

  ModelParams& p = sc.params;
  p.omega = c.number("model.omega");
  p.m = static_cast<int>(c.integer_or("model.m", 3));
  if (p.m < 1) throw ConfigError("config key 'model.m' must be >= 1");
  if (c.has("model.k_eos")) {
    p.k_eos = c.number("model.k_eos");
    const Exponents e = derive_exponents(*p.k_eos, p.omega);
    p.kappa = c.has("model.kappa") ? c.number("model.kappa") : e.kappa;
    p.mu = c.has("model.mu") ? c.number("model.mu") : e.mu;
  } else {
    p.kappa = c.number("model.kappa");
    p.mu = c.number("model.mu");
  }
  p.validate();

  const InitialData data = build_initial(c, sc.grid, sc.seed, p);
  sc.u0 = data.u0;
  sc.u1 = data.u1;

  // Constants: explicit file (or environment override), else calibrate here.
  std::optional<std::filesystem::path> file;
  if (const auto f = c.get("constants.file")) {
    std::filesystem::path path(*f);
    file = path.is_absolute() ? path : c.base_dir / path;
  }
  if (const auto path = constants_path(file)) {
    sc.constants = load_constants(*path);
    sc.constants.require_match(sc.grid, p.m);
    c.set("constants.file", std::filesystem::absolute(*path).lexically_normal().string());
  } else {
    const auto cal_seed = static_cast<std::uint64_t>(c.integer_or("constants.seed", kDefaultCalibrationSeed));
    const int samples = static_cast<int>(c.integer_or("constants.samples", kDefaultCalibrationSamples));
    sc.constants = calibrate(sc.grid, p.m, cal_seed, samples);
    sc.constants_calibrated_here = true;
    c.set("constants.file", "constants.txt");
  }
  c.erase("constants.seed");
  c.erase("constants.samples");

  // Bootstrap quantities.
  BootstrapParams& bp = sc.bootstrap;
  bp.e_m0 = std::sqrt(modified_energy(sc.u0, sc.u1, p.omega, p.m));
  bp.t1 = auto_or_number(c, "bootstrap.t1", 1.0 / p.omega);
  if (!(bp.t1 > 0.0)) throw ConfigError("config key 'bootstrap.t1' must be > 0");
  const bool subcritical = p.omega < 1.0;
  const double h = subcritical ? h_threshold(p.omega, bp.t1) : 0.0;
  bp.eps_prime = auto_or_number(c, "bootstrap.eps_prime", 0.5 * h);
  bp.delta = auto_or_number(c, "bootstrap.delta", bp.e_m0 / p.omega);
  bp.delta_prime = auto_or_number(c, "bootstrap.delta_prime", sc.constants.sobolev * std::sqrt(2.0) * bp.e_m0);
  if (!(bp.delta_prime < 1.0)) {
    throw ConfigError("bootstrap delta' = " + num(bp.delta_prime) +
                      " is not below 1: the data are too large for |u|_inf < 1 to be guaranteed");
  }
  std::string budget_problem;
  if (!(bp.e_m0 > 0.0)) {
    budget_problem = "E_m(0) = 0";
  } else if (!subcritical) {
    budget_problem = "omega >= 1 leaves no admissible eps'";
  } else if (!(bp.eps_prime > 0.0 && bp.eps_prime < h)) {
    budget_problem = "eps' = " + num(bp.eps_prime) + " is not in (0, h(T1)) = (0, " + num(h) + ")";
  } else if (!(bp.delta_prime > 0.0)) {
    budget_problem = "delta' must be > 0";
  } else {
    const double frac = fractional_constant(p.m, p.mu, bp.delta_prime, sc.constants.moser);
    bp.c_delta = source_constant(sc.constants.algebra, frac, bp.e_m0);
    const auto [e1, e2] = epsilon_budgets(bp, p.omega);
    bp.eps1 = e1;
    bp.eps2 = e2;
  }

  // Source.
  const std::string preset = c.get_or("source.preset", "zero");
  const std::string amp_text = c.get_or("source.amplitude", "0");
  double amplitude = 0.0;
  if (amp_text.rfind("budget:", 0) == 0) {
    const double fraction = parse_number(amp_text.substr(7), "source.amplitude");
    if (!budget_problem.empty()) throw ConfigError("source.amplitude = " + amp_text + ": budget undefined (" + budget_problem + ")");
    amplitude = fraction * bp.budget();
  } else {
    amplitude = parse_number(amp_text, "source.amplitude");
  }
  if (!(amplitude >= 0.0)) throw ConfigError("config key 'source.amplitude' must be >= 0");
  const TimeProfile profile = parse_profile(c.get_or("source.time_profile", "steady"));
  const double rate = c.number_or("source.time_rate", 0.0);
  if (preset == "zero") {
    sc.source = SourceSpec::zero(sc.grid);
    amplitude = 0.0;
  } else if (preset == "constant") {
    sc.source = SourceSpec::preset(Field::constant(sc.grid, 1.0), amplitude, p.m, profile, rate);
  } else if (preset == "cosine") {
    const Field shape = cosine_mode(sc.grid, parse_mode(c.get_or("source.mode", "1,0,0"), "source.mode"));
    sc.source = SourceSpec::preset(shape, amplitude, p.m, profile, rate);
  } else if (preset == "fluid") {
    if (!p.k_eos) throw ConfigError("source.preset = fluid requires model.k_eos");
    if (profile != TimeProfile::steady) throw ConfigError("source.preset = fluid is static; time_profile must be steady");
    const FluidPotential pot = preset_potential(sc.grid, c.number_or("source.phi_t", 1.0), c.number_or("source.beta", 0.5));
    sc.source = SourceSpec::fluid(pot, *p.k_eos, amplitude, p.m);
  } else {
    throw ConfigError("config key 'source.preset': unknown preset '" + preset +
                      "' (expected zero, constant, cosine or fluid)");
  }

  SolverConfig& s = sc.solver;
  s.grid = sc.grid;
  s.dt = c.number_or("solver.dt", 0.01);
  s.t_end = c.number("solver.t_end");
  s.sample_every = static_cast<int>(c.integer_or("solver.sample_every", 1));
  s.dealias = c.boolean_or("solver.dealias", true);
  s.validate();

  // Echo with every automatic value substituted.
  c.set("name", sc.name);
  c.set("seed", std::to_string(sc.seed));
  c.set("generator", kGeneratorName);
  c.set("grid.n", std::to_string(sc.grid.n()));
  c.set("model.omega", num(p.omega));
  c.set("model.kappa", num(p.kappa));
  c.set("model.mu", num(p.mu));
  c.set("model.m", std::to_string(p.m));
  c.set("source.preset", preset);
  c.set("source.amplitude", num(amplitude));
  c.set("solver.dt", num(s.dt));
  c.set("solver.t_end", num(s.t_end));
  c.set("solver.sample_every", std::to_string(s.sample_every));
  c.set("solver.dealias", s.dealias ? "true" : "false");
  c.set("bootstrap.t1", num(bp.t1));
  c.set("bootstrap.eps_prime", num(bp.eps_prime));
  c.set("bootstrap.delta", num(bp.delta));
  c.set("bootstrap.delta_prime", num(bp.delta_prime));
  sc.resolved = c;
  return sc;
}

std::string timeseries_csv(const Trajectory& traj, const BootstrapParams& bp) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# torus-wave timeseries schema_version=" << kTimeseriesSchemaVersion << "\n";
  out << "t,Em,Em_sq,E_std_sq,u_Hm,ut_Hm,F_Hm,u_mean,F_mean,u_min,bootstrap_ok\n";
  const double e0_sq = bp.e_m0 * bp.e_m0;
  for (const auto& s : traj.samples) {
    const bool ok = 0.5 * s.u_hm * s.u_hm <= e0_sq * (1.0 + 1e-12);
    out << s.t << ',' << std::sqrt(std::max(0.0, s.e_m_sq)) << ',' << s.e_m_sq << ',' << s.e_std_sq << ',' << s.u_hm
        << ',' << s.ut_hm << ',' << s.f_hm << ',' << s.u_mean << ',' << s.f_mean << ',' << s.u_min << ','
        << (ok ? 1 : 0) << '\n';
  }
  return out.str();
}

RunOutcome run_scenario(const Scenario& sc, const std::optional<std::filesystem::path>& out_dir) {
  RunOutcome outcome;
  outcome.trajectory = simulate(sc.u0, sc.u1, sc.params, sc.source, sc.solver);
  outcome.report = run_all(outcome.trajectory, CheckContext{sc.bootstrap, sc.constants}, sc.name);
  if (outcome.trajectory.breakdown) {
    outcome.exit_code = kExitBreakdown;
    outcome.message = fmt_breakdown(*outcome.trajectory.breakdown);
  } else if (!outcome.report.all_passed()) {
    outcome.exit_code = kExitCheckFailed;
    std::string failed;
    for (const auto& r : outcome.report.results) {
      if (!r.passed && !r.skipped) failed += (failed.empty() ? "" : ", ") + r.check_id;
    }
    outcome.message = "failed checks: " + failed;
  } else {
    outcome.message = "all checks passed or skipped with a reason";
  }
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_file(*out_dir / "timeseries.csv", timeseries_csv(outcome.trajectory, sc.bootstrap));
    std::string text = to_text(outcome.report);
    if (outcome.trajectory.breakdown) text += fmt_breakdown(*outcome.trajectory.breakdown) + "\n";
    write_file(*out_dir / "report.txt", text);
    write_file(*out_dir / "report.csv", to_csv(outcome.report));
    write_file(*out_dir / "scenario.resolved.cfg",
               "# resolved scenario; every automatic value substituted\n" + sc.resolved.to_text());
    if (sc.constants_calibrated_here) save_constants(sc.constants, *out_dir / "constants.txt");
  }
  return outcome;
}

RunOutcome run_config(const ConfigMap& config, const Overrides& overrides,
                      const std::optional<std::filesystem::path>& out_dir) {
  try {
    const Scenario sc = build_scenario(config, overrides);
    return run_scenario(sc, out_dir);
  } catch (const ConfigError& e) {
    return RunOutcome{kExitConfig, std::string("config error: ") + e.what(), {}, {}};
  } catch (const ParameterError& e) {
    return RunOutcome{kExitConfig, std::string("parameter error: ") + e.what(), {}, {}};
  } catch (const DomainError& e) {
    return RunOutcome{kExitConfig, std::string("domain error: ") + e.what(), {}, {}};
  }
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep axis '" + spec + "': expected name=v1,v2,...");
  SweepAxis axis{spec.substr(0, eq), split(spec.substr(eq + 1), ',')};
  static const std::set<std::string> names = {"omega", "k_eos", "eps", "energy"};
  if (!names.count(axis.name)) {
    throw ConfigError("sweep axis '" + axis.name + "': expected one of omega, k_eos, eps, energy");
  }
  if (axis.values.empty() || std::any_of(axis.values.begin(), axis.values.end(), [](const auto& v) { return v.empty(); })) {
    throw ConfigError("sweep axis '" + axis.name + "': empty value list");
  }
  return axis;
}

int run_sweep(const ConfigMap& config, const Overrides& overrides, const std::vector<SweepAxis>& axes,
              const std::filesystem::path& out_dir, int jobs, std::vector<SweepPoint>* points_out) {
  if (axes.empty() || axes.size() > 2) throw ConfigError("sweep: give one or two axes");
  std::vector<std::vector<std::string>> grid = {{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : grid)
      for (const auto& v : axis.values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(p);
      }
    grid = std::move(next);
  }
  std::filesystem::create_directories(out_dir);

  ConfigMap base = config;
  // Constants are shared by every point; calibrate once when no file is given.
  if (!constants_path(base.get("constants.file") ? std::optional<std::filesystem::path>(*base.get("constants.file"))
                                                  : std::nullopt)) {
    GridSpec g(static_cast<int>(overrides.grid ? *overrides.grid : base.integer_or("grid.n", 16)));
    const auto cal = calibrate(g, static_cast<int>(base.integer_or("model.m", 3)),
                               static_cast<std::uint64_t>(base.integer_or("constants.seed", kDefaultCalibrationSeed)),
                               static_cast<int>(base.integer_or("constants.samples", kDefaultCalibrationSamples)));
    const auto path = std::filesystem::absolute(out_dir / "constants.txt");
    save_constants(cal, path);
    base.set("constants.file", path.string());
    base.erase("constants.seed");
    base.erase("constants.samples");
  }

  std::vector<SweepPoint> points(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      ConfigMap c = base;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const std::string& v = grid[i][a];
        const std::string& name = axes[a].name;
        if (name == "omega") c.set("model.omega", v);
        if (name == "k_eos") {
          c.set("model.k_eos", v);
          c.erase("model.kappa");
          c.erase("model.mu");
        }
        if (name == "eps") c.set("source.amplitude", v);
        if (name == "energy") c.set("initial.energy", v);
      }
      std::ostringstream dir;
      dir << "point_" << std::setw(3) << std::setfill('0') << i;
      const RunOutcome o = run_config(c, overrides, out_dir / dir.str());
      points[i] = SweepPoint{grid[i], o.exit_code, o.report.t_max_empirical, o.report.results, o.message};
    }
  };
  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "point";
  for (const auto& a : axes) csv << ',' << a.name;
  csv << ",exit_code,t_max_empirical";
  for (const auto& id : registered_checks()) csv << ',' << id;
  csv << ",message\n";
  int worst = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    csv << i;
    for (const auto& v : p.values) csv << ',' << v;
    csv << ',' << p.exit_code << ',' << (p.t_max_empirical ? num(*p.t_max_empirical) : "");
    for (const auto& id : registered_checks()) {
      const auto it = std::find_if(p.results.begin(), p.results.end(), [&](const CheckResult& r) { return r.check_id == id; });
      csv << ',' << (it == p.results.end() ? "n/a" : it->skipped ? "skip" : it->passed ? "pass" : "fail");
    }
    std::string msg = p.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    csv << ",\"" << msg << "\"\n";
    if (p.exit_code != 0) worst = 1;
  }
  write_file(out_dir / "summary.csv", csv.str());
  if (points_out) *points_out = std::move(points);
  return worst;
}

}  // namespace tw
