#pragma once

// Source term F(t, x, u) = exp(-kappa t) a(t, x) (1 + u)^mu of the damped wave equation
//   u_tt - Laplace(u) = -2 omega u_t + F.

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "torus_wave/torus_field.hpp"

namespace tw {

struct ModelParams {
  double omega = 0.5;   // damping rate (2*omega multiplies u_t)
  double kappa = 0.25;  // source decay rate, > 0
  double mu = 0.5;      // nonlinearity exponent
  std::optional<double> k_eos;  // equation-of-state constant p = K * energy density
  int m = 3;            // Sobolev order of all diagnostics

  /// Throws ParameterError. `global_existence` additionally demands 0 < omega < 1 and m >= 3.
  void validate(bool global_existence = false) const;
};

struct Exponents {
  double kappa;
  double mu;
};

/// kappa = (1 - K) omega / K (stored positive so exp(-kappa t) decays), mu = (2K - 1) / K.
Exponents derive_exponents(double k_eos, double omega);

/// Derivatives of the fluid potential at a fixed time.
struct FluidPotential {
  Field phi_t;
  std::array<Field, 3> phi_grad;

  /// Every derivative multiplied by `lambda`.
  FluidPotential scaled(double lambda) const;
};

/// a = (3 - 1/K)/6 * [(phi_t)^2 - |grad phi|^2]^((1+K)/(2K)), pointwise.
/// Throws DomainError at the first grid point where the bracket is not positive.
Field fluid_source(const FluidPotential& potential, double k_eos);

enum class TimeProfile { steady, cosine, exponential };

/// Prescribed coefficient a(t, x). Every kind reports the amplitude sup_t |a(t)|_{H^m}.
class SourceSpec {
 public:
  enum class Kind { analytic_preset, grid_samples, fluid_potential };

  /// a = 0.
  static SourceSpec zero(const GridSpec& grid);
  /// a = sigma(t) * shape / |shape|_{H^m} * amplitude, with |sigma| <= 1 and sigma(0) = 1.
  static SourceSpec preset(const Field& shape, double amplitude, int m,
                           TimeProfile profile = TimeProfile::steady, double rate = 0.0);
  /// Piecewise-linear interpolation between time-indexed samples, held constant outside.
  static SourceSpec samples(std::vector<double> times, std::vector<Field> fields, int m);
  /// Static a from a fluid potential, rescaled (potential times lambda) to reach `amplitude`.
  static SourceSpec fluid(const FluidPotential& potential, double k_eos, double amplitude, int m);

  Kind kind() const noexcept { return kind_; }
  const GridSpec& grid() const noexcept { return grid_; }
  double amplitude() const noexcept { return amplitude_; }
  bool is_zero() const noexcept { return zero_; }
  /// Scale applied to the fluid potential (1 for other kinds).
  double potential_scale() const noexcept { return potential_scale_; }

  Field at(double t) const;
  double hm_norm_at(double t) const;

 private:
  explicit SourceSpec(GridSpec grid) : grid_(grid) {}
  double profile(double t) const;

  Kind kind_ = Kind::analytic_preset;
  GridSpec grid_;
  int m_ = 3;
  double amplitude_ = 0.0;
  bool zero_ = true;
  double potential_scale_ = 1.0;
  TimeProfile time_profile_ = TimeProfile::steady;
  double rate_ = 0.0;
  std::vector<Field> fields_;        // one shape, or the time samples
  std::vector<double> times_;
  std::vector<double> field_norms_;  // |fields_[i]|_{H^m}
};

/// F = exp(-kappa t) a(t) (1+u)^mu. Throws BreakdownError when 1+u <= 0 somewhere and mu is
/// not a nonnegative integer.
Field eval_source(double t, const Field& u, const ModelParams& params, const SourceSpec& spec);
/// Same, with a(t) already evaluated.
Field eval_source(double t, const Field& u, const ModelParams& params, const Field& a);

bool is_nonnegative_integer(double mu) noexcept;

}  // namespace tw
