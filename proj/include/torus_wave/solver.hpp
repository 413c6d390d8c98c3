#pragma once

// Pseudo-spectral integration of u_tt - Laplace(u) = -2 omega u_t + F(t, x, u).
// The linear part is propagated exactly per Fourier mode; the forcing enters through a
// two-stage exponential predictor-corrector.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torus_wave/energy.hpp"
#include "torus_wave/source.hpp"
#include "torus_wave/torus_field.hpp"

namespace tw {

/// Exact map (v, v') -> (v, v')(dt) for v'' + 2 omega v' + n_sq v = f with f constant on the step:
///   (v, v')(dt) = homogeneous * (v, v')(0) + forcing * f.
struct ModePropagator {
  std::array<std::array<double, 2>, 2> homogeneous{};
  std::array<double, 2> forcing{};
};

ModePropagator mode_propagator(double n_sq, double omega, double dt);

struct SolverState {
  double t = 0.0;
  Field u{GridSpec(4)};
  Field ut{GridSpec(4)};
};

struct SolverConfig {
  GridSpec grid{16};
  double dt = 0.01;
  double t_end = 1.0;
  int sample_every = 1;
  bool dealias = true;

  /// Throws ParameterError; t_end must be a whole number of steps.
  void validate() const;
  std::int64_t step_count() const;
};

struct Trajectory {
  struct Breakdown {
    double t;
    std::string reason;
    std::int64_t step;
  };

  ModelParams params;
  SolverConfig config;
  double source_amplitude = 0.0;  // sup_t |a(t)|_{H^m}
  std::vector<EnergySample> samples;
  std::optional<Breakdown> breakdown;
  SolverState final_state;  // last state that passed every step check
};

/// One step of size config.dt from `state`.
SolverState step(const SolverState& state, const ModelParams& params, const SourceSpec& spec,
                 const SolverConfig& config);

/// Integrates from t = 0 to config.t_end. Breakdown ends the run early and is recorded, not thrown.
Trajectory simulate(const Field& u0, const Field& u1, const ModelParams& params, const SourceSpec& spec,
                    const SolverConfig& config);

struct MeanReferencePoint {
  double t;
  double u_mean;
};

/// u_mean(t) = 1/(2 omega) int_0^t (1 - exp(-2 omega (t - s))) F_mean(s) ds, trapezoid over the
/// recorded samples. Throws ParameterError when the recorded initial means are not zero.
std::vector<MeanReferencePoint> mean_mode_reference(const Trajectory& trajectory, const ModelParams& params);

/// Spectral-space integrator that keeps propagators for every |n|^2 on the grid.
class Stepper {
 public:
  Stepper(const ModelParams& params, const SourceSpec& spec, const SolverConfig& config);

  void reset(double t, const Field& u, const Field& ut);
  double time() const noexcept { return t_; }
  const Spectrum& u_hat() const noexcept { return u_hat_; }
  const Spectrum& ut_hat() const noexcept { return ut_hat_; }
  const Field& u() const noexcept { return u_; }
  /// Forcing at the current time, after dealiasing (what the next step applies).
  const Spectrum& forcing() const noexcept { return f_hat_; }
  SolverState state() const;

  /// Advances one step. Throws BreakdownError; the state is left unchanged when it does.
  void advance();

  EnergySample sample() const;

 private:
  Spectrum forcing_at(double t, const Field& u) const;

  ModelParams params_;
  SourceSpec spec_;
  SolverConfig config_;
  SpectralNorms norms_;
  std::vector<int> mode_class_;  // per storage index: index into props_
  std::vector<ModePropagator> props_;

  double t_start_ = 0.0;
  double t_ = 0.0;
  std::int64_t steps_ = 0;
  Spectrum u_hat_;
  Spectrum ut_hat_;
  Spectrum f_hat_;
  Field u_;
};

}  // namespace tw
