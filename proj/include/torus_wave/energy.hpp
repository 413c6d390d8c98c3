#pragma once

#include <vector>

#include "torus_wave/torus_field.hpp"

namespace tw {

/// Diagnostics recorded along a trajectory at one sample time.
struct EnergySample {
  double t = 0.0;
  double e_m_sq = 0.0;     // modified energy E_m^2
  double e_std_sq = 0.0;   // standard wave energy 1/2 (|u_t|_{H^m}^2 + |grad u|_{H^m}^2)
  double u_hm = 0.0;
  double ut_hm = 0.0;
  double f_hm = 0.0;       // forcing actually applied by the solver
  double a_hm = 0.0;       // |a(t, .)|_{H^m}
  double grad_u_hm = 0.0;  // |grad u|_{H^m}
  double u_osc_hm = 0.0;   // |u - mean(u)|_{H^m}
  double u_mean = 0.0;
  double ut_mean = 0.0;
  double f_mean = 0.0;
  double u_min = 0.0;
  double u_sup = 0.0;
};

/// Modified energy E_m^2 = sum over |alpha| <= m of the quadratic form
///   1/2 int [(v_t)^2 + omega v v_t + omega^2 v^2 / 2] + 1/2 int |grad v|^2,  v = d^alpha u.
/// Evaluated spectrally; exact for band-limited fields.
double modified_energy(const Field& u, const Field& ut, double omega, int m);

/// 1/2 (|u_t|_{H^m}^2 + |grad u|_{H^m}^2)
double standard_energy(const Field& u, const Field& ut, int m);

/// |u_t + (omega/2) u|_{L^2}
double damped_combination_norm(const Field& u, const Field& ut, double omega);

/// Precomputed Sobolev weights for repeated spectral evaluation on one grid.
class SpectralNorms {
 public:
  SpectralNorms(GridSpec grid, int m);

  const GridSpec& grid() const noexcept { return grid_; }
  int order() const noexcept { return m_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> wavenumber_sq() const noexcept { return n_sq_; }

  double hm_sq(const Spectrum& s) const;
  /// |grad u|_{H^m}^2
  double grad_hm_sq(const Spectrum& s) const;
  /// |u - mean|_{H^m}^2
  double oscillatory_hm_sq(const Spectrum& s) const;
  double modified_energy_sq(const Spectrum& u, const Spectrum& ut, double omega) const;
  double standard_energy_sq(const Spectrum& u, const Spectrum& ut) const;

 private:
  void check_grid(const Spectrum& s) const;

  GridSpec grid_;
  int m_;
  std::vector<double> weights_;
  std::vector<double> n_sq_;
};

}  // namespace tw
