#include "torus_wave/source.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "torus_wave/error.hpp"

namespace tw {

void ModelParams::validate(bool global_existence) const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ParameterError("omega must be > 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ParameterError("kappa must be > 0");
  if (!std::isfinite(mu)) throw ParameterError("mu must be finite");
  if (m < 0) throw ParameterError("Sobolev order m must be >= 0");
  if (k_eos) {
    const Exponents e = derive_exponents(*k_eos, omega);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    if (!close(kappa, e.kappa) || !close(mu, e.mu)) {
      throw ParameterError("kappa and mu are inconsistent with the equation-of-state constant K");
    }
  }
  if (global_existence) {
    if (!(omega < 1.0)) throw ParameterError("global-existence regime requires 0 < omega < 1");
    if (m < 3) throw ParameterError("global-existence regime requires m >= 3");
  }
}

Exponents derive_exponents(double k_eos, double omega) {
  if (!(k_eos > 0.0 && k_eos < 1.0)) {
    std::ostringstream msg;
    msg << "equation-of-state constant K = " << k_eos
        << " is outside (0, 1); the linear equation of state p = K * energy density requires 0 < K < 1";
    throw ParameterError(msg.str());
  }
  if (!(omega > 0.0)) throw ParameterError("omega must be > 0");
  return {(1.0 - k_eos) * omega / k_eos, (2.0 * k_eos - 1.0) / k_eos};
}

FluidPotential FluidPotential::scaled(double lambda) const {
  FluidPotential out = *this;
  out.phi_t *= lambda;
  for (auto& g : out.phi_grad) g *= lambda;
  return out;
}

Field fluid_source(const FluidPotential& potential, double k_eos) {
  if (!(k_eos > 0.0 && k_eos < 1.0)) {
    throw ParameterError("fluid_source: equation-of-state constant K must satisfy 0 < K < 1");
  }
  const GridSpec& g = potential.phi_t.grid;
  for (const auto& c : potential.phi_grad) {
    if (!(c.grid == g)) throw ParameterError("fluid_source: grid mismatch");
  }
  const double prefactor = (3.0 - 1.0 / k_eos) / 6.0;
  const double exponent = (1.0 + k_eos) / (2.0 * k_eos);
  Field a(g);
  const int n = g.n();
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double pt = potential.phi_t.values[q];
    const double gx = potential.phi_grad[0].values[q];
    const double gy = potential.phi_grad[1].values[q];
    const double gz = potential.phi_grad[2].values[q];
    const double bracket = pt * pt - (gx * gx + gy * gy + gz * gz);
    if (!(bracket > 0.0)) {
      std::ostringstream msg;
      msg << "fluid_source: potential gradient is not timelike at grid point (" << q / (n * n) << ", "
          << (q / n) % n << ", " << q % n << "): (phi_t)^2 - |grad phi|^2 = " << bracket;
      throw DomainError(msg.str());
    }
    a.values[q] = prefactor * std::pow(bracket, exponent);
  }
  return a;
}

SourceSpec SourceSpec::zero(const GridSpec& grid) { return SourceSpec(grid); }

SourceSpec SourceSpec::preset(const Field& shape, double amplitude, int m, TimeProfile profile, double rate) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ParameterError("source amplitude must be >= 0");
  if (profile != TimeProfile::steady && !(rate >= 0.0)) throw ParameterError("source time rate must be >= 0");
  SourceSpec s(shape.grid);
  s.m_ = m;
  s.time_profile_ = profile;
  s.rate_ = rate;
  const double norm = sobolev_norm(shape, m);
  if (amplitude == 0.0 || norm == 0.0) return s;
  Field scaled = shape;
  scaled *= amplitude / norm;
  s.zero_ = false;
  s.amplitude_ = amplitude;
  s.field_norms_.push_back(amplitude);
  s.fields_.push_back(std::move(scaled));
  return s;
}

SourceSpec SourceSpec::samples(std::vector<double> times, std::vector<Field> fields, int m) {
  if (times.empty() || times.size() != fields.size()) {
    throw ParameterError("source samples: need one field per time and at least one sample");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ParameterError("source samples: times must be increasing");
  }
  SourceSpec s(fields.front().grid);
  s.kind_ = Kind::grid_samples;
  s.m_ = m;
  for (const auto& f : fields) {
    if (!(f.grid == s.grid_)) throw ParameterError("source samples: grid mismatch");
    s.field_norms_.push_back(sobolev_norm(f, m));
  }
  // Linear interpolation never exceeds the larger endpoint norm.
  s.amplitude_ = *std::max_element(s.field_norms_.begin(), s.field_norms_.end());
  s.zero_ = s.amplitude_ == 0.0;
  s.times_ = std::move(times);
  s.fields_ = std::move(fields);
  return s;
}

SourceSpec SourceSpec::fluid(const FluidPotential& potential, double k_eos, double amplitude, int m) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ParameterError("source amplitude must be >= 0");
  SourceSpec s(potential.phi_t.grid);
  s.kind_ = Kind::fluid_potential;
  s.m_ = m;
  const Field base = fluid_source(potential, k_eos);
  const double norm = sobolev_norm(base, m);
  if (amplitude == 0.0 || norm == 0.0) return s;
  // a scales as lambda^((1+K)/K) when the potential is scaled by lambda.
  const double lambda = std::pow(amplitude / norm, k_eos / (1.0 + k_eos));
  s.potential_scale_ = lambda;
  Field a = fluid_source(potential.scaled(lambda), k_eos);
  s.amplitude_ = sobolev_norm(a, m);
  s.zero_ = false;
  s.field_norms_.push_back(s.amplitude_);
  s.fields_.push_back(std::move(a));
  return s;
}

double SourceSpec::profile(double t) const {
  switch (time_profile_) {
    case TimeProfile::steady: return 1.0;
    case TimeProfile::cosine: return std::cos(rate_ * t);
    case TimeProfile::exponential: return std::exp(-rate_ * t);
  }
  return 1.0;
}

Field SourceSpec::at(double t) const {
  if (zero_) return Field(grid_);
  if (kind_ != Kind::grid_samples) {
    Field a = fields_.front();
    const double sigma = profile(t);
    if (sigma != 1.0) a *= sigma;
    return a;
  }
  if (t <= times_.front()) return fields_.front();
  if (t >= times_.back()) return fields_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  Field a = fields_[lo];
  for (std::size_t q = 0; q < a.values.size(); ++q) {
    a.values[q] = (1.0 - w) * fields_[lo].values[q] + w * fields_[hi].values[q];
  }
  return a;
}

double SourceSpec::hm_norm_at(double t) const {
  if (zero_) return 0.0;
  if (kind_ != Kind::grid_samples) return std::abs(profile(t)) * field_norms_.front();
  return sobolev_norm(at(t), m_);
}

bool is_nonnegative_integer(double mu) noexcept { return mu >= 0.0 && std::floor(mu) == mu; }

Field eval_source(double t, const Field& u, const ModelParams& params, const Field& a) {
  if (!(u.grid == a.grid)) throw ParameterError("eval_source: grid mismatch");
  const double decay = std::exp(-params.kappa * t);
  const bool integer_power = is_nonnegative_integer(params.mu);
  Field f(u.grid);
  double u_min = 0.0;
  bool broken = false;
  for (std::size_t q = 0; q < u.values.size(); ++q) {
    const double base = 1.0 + u.values[q];
    if (!integer_power && !(base > 0.0)) {
      u_min = broken ? std::min(u_min, u.values[q]) : u.values[q];
      broken = true;
      continue;
    }
    f.values[q] = params.mu == 0.0 ? decay * a.values[q] : decay * a.values[q] * std::pow(base, params.mu);
  }
  if (broken) {
    for (double v : u.values) u_min = std::min(u_min, v);
    std::ostringstream msg;
    msg << "breakdown at t = " << t << ": min u = " << u_min
        << " leaves the domain of (1+u)^mu for mu = " << params.mu;
    throw BreakdownError(msg.str(), t, u_min);
  }
  return f;
}

Field eval_source(double t, const Field& u, const ModelParams& params, const SourceSpec& spec) {
  if (!(t >= 0.0)) throw ParameterError("eval_source: t must be >= 0");
  return eval_source(t, u, params, spec.at(t));
}

}  // namespace tw
