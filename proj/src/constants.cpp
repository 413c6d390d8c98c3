#include "torus_wave/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "torus_wave/error.hpp"
#include "torus_wave/random_fields.hpp"

namespace tw {

namespace {

// Exponents used to probe the composition estimate.
constexpr double kProbeExponents[] = {-0.5, 0.5, 1.5, 2.5};

double int_power(int base, int exponent) {
  double out = 1.0;
  for (int e = 0; e < exponent; ++e) out *= base;
  return out;
}

double derivative_norm(const Spectrum& s, const MultiIndex& alpha) {
  const GridSpec& g = s.grid;
  const int n = g.n();
  // Odd orders drop the Nyquist plane, as spectral_derivative does.
  std::array<std::vector<double>, 3> axis;
  for (int d = 0; d < 3; ++d) {
    axis[d].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      axis[d][static_cast<std::size_t>(i)] =
          (alpha[d] % 2 && g.is_nyquist(i)) ? 0.0 : int_power(g.wavenumber(i), 2 * alpha[d]);
    }
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double wij = axis[0][static_cast<std::size_t>(i)] * axis[1][static_cast<std::size_t>(j)];
      if (wij == 0.0) continue;
      for (int k = 0; k < n; ++k) sum += wij * axis[2][static_cast<std::size_t>(k)] * std::norm(s.coeffs[g.flat(i, j, k)]);
    }
  return std::sqrt(kTorusVolume * sum);
}

std::string format_double(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

}  // namespace

void CalibratedConstants::require_match(const GridSpec& grid, int order) const {
  if (grid_n != grid.n() || m != order) {
    std::ostringstream msg;
    msg << "calibrated constants are for grid " << grid_n << "^3, m = " << m << "; the scenario uses grid "
        << grid.n() << "^3, m = " << order << " (recalibrate with `torus-wave calibrate`)";
    throw ConfigError(msg.str());
  }
  if (moser.size() != static_cast<std::size_t>(m)) throw ConfigError("calibrated constants: wrong number of Moser constants");
}

double sobolev_bound(const GridSpec& grid, int m) {
  double sum = 0.0;
  for (double w : sobolev_weights(grid, m)) sum += 1.0 / w;
  return std::sqrt(sum) / std::pow(kTwoPi, 1.5);
}

std::vector<double> moser_ratios(const Field& u, double mu, int m) {
  const GridSpec fine(2 * u.grid.n());
  const Field uf = resample(u, fine);
  const double u_inf = sup_norm(uf);
  Field comp(fine);
  for (std::size_t q = 0; q < uf.values.size(); ++q) {
    const double base = 1.0 + uf.values[q];
    if (!(base > 0.0)) throw DomainError("moser_ratios: 1 + u must be positive");
    comp.values[q] = std::pow(base, mu);
  }
  const Spectrum comp_hat = transform(comp);
  const Spectrum u_hat = transform(u);

  std::vector<double> ratios;
  double deriv_scale = 0.0;  // max over l <= k of |F^(l)(u)|_inf |u|_inf^{l-1}
  for (int k = 1; k <= m; ++k) {
    double peak = 0.0;
    for (double x : uf.values) {
      double falling = 1.0;
      for (int j = 0; j < k; ++j) falling *= (mu - j);
      peak = std::max(peak, std::abs(falling * std::pow(1.0 + x, mu - k)));
    }
    deriv_scale = std::max(deriv_scale, peak * std::pow(u_inf, k - 1));
    double top_u = 0.0, top_f = 0.0;
    for (const auto& alpha : multi_indices(k, true)) {
      top_u = std::max(top_u, derivative_norm(u_hat, alpha));
      top_f = std::max(top_f, derivative_norm(comp_hat, alpha));
    }
    const double denom = deriv_scale * top_u;
    ratios.push_back(denom > 0.0 ? top_f / denom : 0.0);
  }
  return ratios;
}

CalibratedConstants calibrate(const GridSpec& grid, int m, std::uint64_t seed, int samples, double margin) {
  if (m < 1) throw ParameterError("calibrate: m must be >= 1");
  if (samples < 1) throw ParameterError("calibrate: need at least one sample");
  if (!(margin >= 1.0)) throw ParameterError("calibrate: margin must be >= 1");
  CalibratedConstants c;
  c.grid_n = grid.n();
  c.m = m;
  c.seed = seed;
  c.samples = samples;
  c.margin = margin;
  c.generator = kGeneratorName;
  c.moser.assign(static_cast<std::size_t>(m), 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sup_dist(0.05, 0.5);
  const int kmax = std::max(1, std::min(grid.n() / 2 - 1, grid.dealias_cutoff()));
  const double decays[] = {0.5, 1.0, 2.0};
  std::uniform_real_distribution<double> offset_dist(-2.0, 2.0);
  // Band limit, envelope and mean offset vary so near-constant fields are covered too.
  auto draw = [&](int s) {
    RandomFieldOptions opt;
    opt.max_wavenumber = 1 + s % kmax;
    opt.decay = decays[(s / kmax) % 3];
    Field f = random_band_limited_field(grid, rng, opt);
    const double shift = offset_dist(rng) * sup_norm(f);
    for (double& v : f.values) v += shift;
    f *= sup_dist(rng) / sup_norm(f);
    return f;
  };
  double sob = 0.0, alg = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Field u = draw(s);
    const Field v = draw(s + 1);

    const double u_hm = sobolev_norm(u, m), v_hm = sobolev_norm(v, m);
    sob = std::max(sob, sup_norm(u) / u_hm);
    const Spectrum uv = padded_product(u, v);
    alg = std::max(alg, sobolev_norm(uv, m) / (u_hm * v_hm));
    for (double mu : kProbeExponents) {
      const auto r = moser_ratios(u, mu, m);
      for (int k = 0; k < m; ++k) c.moser[static_cast<std::size_t>(k)] = std::max(c.moser[static_cast<std::size_t>(k)], r[static_cast<std::size_t>(k)]);
    }
  }
  c.sobolev = std::min(margin * sob, sobolev_bound(grid, m));
  c.algebra = margin * alg;
  for (double& x : c.moser) x *= margin;
  return c;
}

std::string to_text(const CalibratedConstants& c) {
  std::ostringstream out;
  out << "# torus-wave calibrated constants\n";
  out << "format_version = " << kConstantsFormatVersion << "\n";
  out << "grid_n = " << c.grid_n << "\n";
  out << "m = " << c.m << "\n";
  out << "generator = " << c.generator << "\n";
  out << "seed = " << c.seed << "\n";
  out << "samples = " << c.samples << "\n";
  out << "margin = " << format_double(c.margin) << "\n";
  out << "sobolev = " << format_double(c.sobolev) << "\n";
  out << "algebra = " << format_double(c.algebra) << "\n";
  for (std::size_t k = 0; k < c.moser.size(); ++k) out << "moser." << k + 1 << " = " << format_double(c.moser[k]) << "\n";
  return out.str();
}

CalibratedConstants parse_constants(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("constants file line " + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("constants file: missing key '" + key + "'");
    return it->second;
  };
  CalibratedConstants c;
  try {
    if (std::stoi(get("format_version")) != kConstantsFormatVersion) throw ConfigError("constants file: unsupported format_version");
    c.grid_n = std::stoi(get("grid_n"));
    c.m = std::stoi(get("m"));
    c.generator = get("generator");
    c.seed = std::stoull(get("seed"));
    c.samples = std::stoi(get("samples"));
    c.margin = std::stod(get("margin"));
    c.sobolev = std::stod(get("sobolev"));
    c.algebra = std::stod(get("algebra"));
    for (int k = 1; k <= c.m; ++k) c.moser.push_back(std::stod(get("moser." + std::to_string(k))));
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("constants file: malformed number (") + e.what() + ")");
  }
  return c;
}

void save_constants(const CalibratedConstants& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write constants file " + path.string());
  out << to_text(c);
}

CalibratedConstants load_constants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read constants file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_constants(buffer.str());
}

std::optional<std::filesystem::path> constants_path(const std::optional<std::filesystem::path>& explicit_path) {
  if (const char* env = std::getenv(kConstantsEnvVar); env != nullptr && *env != '\0') return std::filesystem::path(env);
  return explicit_path;
}

}  // namespace tw
