#include "torus_wave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "torus_wave/error.hpp"

namespace tw {

ModePropagator mode_propagator(double n_sq, double omega, double dt) {
  if (!(omega > 0.0)) throw ParameterError("mode_propagator: omega must be > 0");
  if (!(n_sq >= 0.0)) throw ParameterError("mode_propagator: n_sq must be >= 0");
  if (!(dt >= 0.0)) throw ParameterError("mode_propagator: dt must be >= 0");
  ModePropagator p;
  if (dt == 0.0) {
    p.homogeneous = {{{1.0, 0.0}, {0.0, 1.0}}};
    return p;
  }

  // v = e^{-omega t} [v0 C + (v1 + omega v0) S],  v' = e^{-omega t} [v1 C - (n_sq v0 + omega v1) S]
  const double d = n_sq - omega * omega;
  const double x = d * dt * dt;
  double c, s;
  if (std::abs(x) < 1e-3) {
    c = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0 + x * x * x * x / 40320.0;
    s = dt * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0 + x * x * x * x / 362880.0);
  } else if (d > 0.0) {
    const double w = std::sqrt(d);
    c = std::cos(w * dt);
    s = std::sin(w * dt) / w;
  } else {
    const double r = std::sqrt(-d);
    c = std::cosh(r * dt);
    s = std::sinh(r * dt) / r;
  }
  const double e = std::exp(-omega * dt);
  p.homogeneous = {{{e * (c + omega * s), e * s}, {-e * n_sq * s, e * (c - omega * s)}}};

  if (n_sq == 0.0) {
    // v'' + 2 omega v' = f from rest
    const double one_minus = -std::expm1(-2.0 * omega * dt);
    p.homogeneous[0][1] = one_minus / (2.0 * omega);
    p.homogeneous[1][1] = 1.0 - one_minus;
    p.homogeneous[0][0] = 1.0;
    p.homogeneous[1][0] = 0.0;
    p.forcing = {dt / (2.0 * omega) - one_minus / (4.0 * omega * omega), one_minus / (2.0 * omega)};
  } else {
    p.forcing = {(1.0 - p.homogeneous[0][0]) / n_sq, -p.homogeneous[1][0] / n_sq};
  }
  return p;
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("solver: dt must be > 0");
  if (!(t_end > dt) || !std::isfinite(t_end)) throw ParameterError("solver: t_end must exceed dt");
  if (sample_every < 1) throw ParameterError("solver: sample_every must be >= 1");
  const double ratio = t_end / dt;
  if (ratio > 9.0e15) throw ParameterError("solver: t_end / dt does not fit in an integer");
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ParameterError("solver: t_end must be a whole number of steps of size dt");
  }
}

std::int64_t SolverConfig::step_count() const { return std::llround(t_end / dt); }

Stepper::Stepper(const ModelParams& params, const SourceSpec& spec, const SolverConfig& config)
    : params_(params),
      spec_(spec),
      config_(config),
      norms_(config.grid, params.m),
      mode_class_(config.grid.size()),
      u_hat_(config.grid),
      ut_hat_(config.grid),
      f_hat_(config.grid),
      u_(config.grid) {
  params_.validate();
  config_.validate();
  if (!(spec_.grid() == config_.grid)) throw ParameterError("solver: source grid differs from solver grid");
  // |n|^2 is an integer on the lattice, so propagators are shared by whole shells.
  std::map<long, int> shells;
  const auto n_sq = norms_.wavenumber_sq();
  for (std::size_t q = 0; q < n_sq.size(); ++q) {
    const long key = std::lround(n_sq[q]);
    auto [it, inserted] = shells.try_emplace(key, static_cast<int>(props_.size()));
    if (inserted) props_.push_back(mode_propagator(static_cast<double>(key), params_.omega, config_.dt));
    mode_class_[q] = it->second;
  }
}

Spectrum Stepper::forcing_at(double t, const Field& u) const {
  if (spec_.is_zero()) return Spectrum(config_.grid);
  Spectrum f = transform(eval_source(t, u, params_, spec_));
  if (config_.dealias) dealias(f);
  return f;
}

void Stepper::reset(double t, const Field& u, const Field& ut) {
  if (!(u.grid == config_.grid) || !(ut.grid == config_.grid)) {
    throw ParameterError("solver: initial data grid differs from solver grid");
  }
  t_start_ = t;
  t_ = t;
  steps_ = 0;
  u_hat_ = transform(u);
  ut_hat_ = transform(ut);
  u_ = inverse_transform(u_hat_);
  f_hat_ = forcing_at(t_, u_);
}

SolverState Stepper::state() const { return {t_, u_, inverse_transform(ut_hat_)}; }

void Stepper::advance() {
  const double t_next = t_start_ + static_cast<double>(steps_ + 1) * config_.dt;
  const std::size_t size = u_hat_.coeffs.size();

  Spectrum u_pred(config_.grid);
  for (std::size_t q = 0; q < size; ++q) {
    const ModePropagator& p = props_[mode_class_[q]];
    u_pred.coeffs[q] = p.homogeneous[0][0] * u_hat_.coeffs[q] + p.homogeneous[0][1] * ut_hat_.coeffs[q] +
                       p.forcing[0] * f_hat_.coeffs[q];
  }
  Spectrum f_avg = f_hat_;
  if (!spec_.is_zero()) {
    const Spectrum f_pred = forcing_at(t_next, inverse_transform(u_pred));
    for (std::size_t q = 0; q < size; ++q) f_avg.coeffs[q] = 0.5 * (f_hat_.coeffs[q] + f_pred.coeffs[q]);
  }

  Spectrum u_new(config_.grid), ut_new(config_.grid);
  bool finite = true;
  for (std::size_t q = 0; q < size; ++q) {
    const ModePropagator& p = props_[mode_class_[q]];
    const Complex v = u_hat_.coeffs[q], w = ut_hat_.coeffs[q], f = f_avg.coeffs[q];
    u_new.coeffs[q] = p.homogeneous[0][0] * v + p.homogeneous[0][1] * w + p.forcing[0] * f;
    ut_new.coeffs[q] = p.homogeneous[1][0] * v + p.homogeneous[1][1] * w + p.forcing[1] * f;
    finite = finite && std::isfinite(u_new.coeffs[q].real()) && std::isfinite(u_new.coeffs[q].imag()) &&
             std::isfinite(ut_new.coeffs[q].real()) && std::isfinite(ut_new.coeffs[q].imag());
  }
  if (!finite) {
    std::ostringstream msg;
    msg << "non-finite state produced by step " << steps_ + 1 << " (t = " << t_next << ")";
    throw BreakdownError(msg.str(), t_next, std::nan(""));
  }
  Field u_field = inverse_transform(u_new);
  Spectrum f_new = forcing_at(t_next, u_field);

  u_hat_ = std::move(u_new);
  ut_hat_ = std::move(ut_new);
  u_ = std::move(u_field);
  f_hat_ = std::move(f_new);
  t_ = t_next;
  ++steps_;
}

EnergySample Stepper::sample() const {
  EnergySample s;
  s.t = t_;
  s.e_m_sq = norms_.modified_energy_sq(u_hat_, ut_hat_, params_.omega);
  s.e_std_sq = norms_.standard_energy_sq(u_hat_, ut_hat_);
  s.u_hm = std::sqrt(norms_.hm_sq(u_hat_));
  s.ut_hm = std::sqrt(norms_.hm_sq(ut_hat_));
  s.f_hm = std::sqrt(norms_.hm_sq(f_hat_));
  s.a_hm = spec_.hm_norm_at(t_);
  s.grad_u_hm = std::sqrt(norms_.grad_hm_sq(u_hat_));
  s.u_osc_hm = std::sqrt(norms_.oscillatory_hm_sq(u_hat_));
  s.u_mean = u_hat_.coeffs[0].real();
  s.ut_mean = ut_hat_.coeffs[0].real();
  s.f_mean = f_hat_.coeffs[0].real();
  const auto [lo, hi] = std::minmax_element(u_.values.begin(), u_.values.end());
  s.u_min = *lo;
  s.u_sup = std::max(std::abs(*lo), std::abs(*hi));
  return s;
}

SolverState step(const SolverState& state, const ModelParams& params, const SourceSpec& spec,
                 const SolverConfig& config) {
  config.validate();
  if (!(state.u.grid == config.grid) || !(state.ut.grid == config.grid)) {
    throw ParameterError("step: state grid differs from solver grid");
  }
  const double dt = config.dt;
  const SpectralNorms norms(config.grid, params.m);
  const auto n_sq = norms.wavenumber_sq();
  auto forcing = [&](double t, const Field& u) {
    Spectrum f = transform(eval_source(t, u, params, spec));
    if (config.dealias) dealias(f);
    return f;
  };
  const Spectrum v = transform(state.u), w = transform(state.ut);
  const Spectrum f0 = forcing(state.t, state.u);
  Spectrum pred(config.grid);
  std::vector<ModePropagator> props(n_sq.size());
  for (std::size_t q = 0; q < n_sq.size(); ++q) {
    props[q] = mode_propagator(n_sq[q], params.omega, dt);
    pred.coeffs[q] = props[q].homogeneous[0][0] * v.coeffs[q] + props[q].homogeneous[0][1] * w.coeffs[q] +
                     props[q].forcing[0] * f0.coeffs[q];
  }
  const Spectrum f1 = forcing(state.t + dt, inverse_transform(pred));
  Spectrum u_new(config.grid), ut_new(config.grid);
  for (std::size_t q = 0; q < n_sq.size(); ++q) {
    const Complex f = 0.5 * (f0.coeffs[q] + f1.coeffs[q]);
    u_new.coeffs[q] = props[q].homogeneous[0][0] * v.coeffs[q] + props[q].homogeneous[0][1] * w.coeffs[q] +
                      props[q].forcing[0] * f;
    ut_new.coeffs[q] = props[q].homogeneous[1][0] * v.coeffs[q] + props[q].homogeneous[1][1] * w.coeffs[q] +
                       props[q].forcing[1] * f;
  }
  return {state.t + dt, inverse_transform(u_new), inverse_transform(ut_new)};
}

Trajectory simulate(const Field& u0, const Field& u1, const ModelParams& params, const SourceSpec& spec,
                    const SolverConfig& config) {
  Trajectory traj;
  traj.params = params;
  traj.config = config;
  traj.source_amplitude = spec.amplitude();

  Stepper stepper(params, spec, config);
  try {
    stepper.reset(0.0, u0, u1);
  } catch (const BreakdownError& e) {
    traj.breakdown = Trajectory::Breakdown{0.0, e.what(), 0};
    traj.final_state = {0.0, u0, u1};
    return traj;
  }
  const std::int64_t total = config.step_count();
  traj.samples.reserve(static_cast<std::size_t>(total / config.sample_every + 2));
  traj.samples.push_back(stepper.sample());
  for (std::int64_t n = 1; n <= total; ++n) {
    try {
      stepper.advance();
    } catch (const BreakdownError& e) {
      traj.breakdown = Trajectory::Breakdown{e.time(), e.what(), n};
      break;
    }
    if (n % config.sample_every == 0 || n == total) traj.samples.push_back(stepper.sample());
  }
  if (traj.breakdown && traj.samples.back().t != stepper.time()) traj.samples.push_back(stepper.sample());
  traj.final_state = stepper.state();
  return traj;
}

std::vector<MeanReferencePoint> mean_mode_reference(const Trajectory& trajectory, const ModelParams& params) {
  const auto& s = trajectory.samples;
  if (s.empty()) return {};
  if (std::abs(s.front().u_mean) > 1e-12 || std::abs(s.front().ut_mean) > 1e-12) {
    throw ParameterError(
        "mean_mode_reference: the reference formula requires initial data with zero mean in u and u_t");
  }
  const double two_omega = 2.0 * params.omega;
  std::vector<MeanReferencePoint> out;
  out.reserve(s.size());
  out.push_back({s.front().t, 0.0});
  // int F and int exp(-2 omega (t - s)) F, both by the trapezoid rule.
  double plain = 0.0, damped = 0.0;
  for (std::size_t j = 1; j < s.size(); ++j) {
    const double h = s[j].t - s[j - 1].t;
    const double decay = std::exp(-two_omega * h);
    plain += 0.5 * h * (s[j - 1].f_mean + s[j].f_mean);
    damped = decay * damped + 0.5 * h * (decay * s[j - 1].f_mean + s[j].f_mean);
    out.push_back({s[j].t, (plain - damped) / two_omega});
  }
  return out;
}

}  // namespace tw
