#include "torus_wave/energy.hpp"

#include <cmath>

#include "torus_wave/error.hpp"

namespace tw {

SpectralNorms::SpectralNorms(GridSpec grid, int m)
    : grid_(grid), m_(m), weights_(sobolev_weights(grid, m)), n_sq_(grid.size()) {
  const int n = grid.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double a = grid.wavenumber(i), b = grid.wavenumber(j), c = grid.wavenumber(k);
        n_sq_[grid.flat(i, j, k)] = a * a + b * b + c * c;
      }
}

void SpectralNorms::check_grid(const Spectrum& s) const {
  if (!(s.grid == grid_)) throw ParameterError("spectral norms: grid mismatch");
}

double SpectralNorms::hm_sq(const Spectrum& s) const {
  check_grid(s);
  double sum = 0.0;
  for (std::size_t q = 0; q < weights_.size(); ++q) sum += weights_[q] * std::norm(s.coeffs[q]);
  return kTorusVolume * sum;
}

double SpectralNorms::grad_hm_sq(const Spectrum& s) const {
  check_grid(s);
  double sum = 0.0;
  for (std::size_t q = 0; q < weights_.size(); ++q) sum += weights_[q] * n_sq_[q] * std::norm(s.coeffs[q]);
  return kTorusVolume * sum;
}

double SpectralNorms::oscillatory_hm_sq(const Spectrum& s) const {
  check_grid(s);
  double sum = 0.0;
  // Storage index 0 is the mean.
  for (std::size_t q = 1; q < weights_.size(); ++q) sum += weights_[q] * std::norm(s.coeffs[q]);
  return kTorusVolume * sum;
}

double SpectralNorms::modified_energy_sq(const Spectrum& u, const Spectrum& ut, double omega) const {
  check_grid(u);
  check_grid(ut);
  double sum = 0.0;
  for (std::size_t q = 0; q < weights_.size(); ++q) {
    const Complex v = u.coeffs[q];
    const Complex w = ut.coeffs[q];
    const double form = std::norm(w) + omega * (v.real() * w.real() + v.imag() * w.imag()) +
                        0.5 * omega * omega * std::norm(v) + n_sq_[q] * std::norm(v);
    sum += weights_[q] * form;
  }
  return 0.5 * kTorusVolume * sum;
}

double SpectralNorms::standard_energy_sq(const Spectrum& u, const Spectrum& ut) const {
  check_grid(u);
  check_grid(ut);
  double sum = 0.0;
  for (std::size_t q = 0; q < weights_.size(); ++q) {
    sum += weights_[q] * (std::norm(ut.coeffs[q]) + n_sq_[q] * std::norm(u.coeffs[q]));
  }
  return 0.5 * kTorusVolume * sum;
}

double modified_energy(const Field& u, const Field& ut, double omega, int m) {
  if (!(omega > 0.0)) throw ParameterError("modified_energy: omega must be > 0");
  if (!(u.grid == ut.grid)) throw ParameterError("modified_energy: grid mismatch");
  const SpectralNorms norms(u.grid, m);
  return norms.modified_energy_sq(transform(u), transform(ut), omega);
}

double standard_energy(const Field& u, const Field& ut, int m) {
  if (!(u.grid == ut.grid)) throw ParameterError("standard_energy: grid mismatch");
  const SpectralNorms norms(u.grid, m);
  return norms.standard_energy_sq(transform(u), transform(ut));
}

double damped_combination_norm(const Field& u, const Field& ut, double omega) {
  if (!(omega > 0.0)) throw ParameterError("damped_combination_norm: omega must be > 0");
  Field combo = ut;
  for (std::size_t q = 0; q < combo.values.size(); ++q) combo.values[q] += 0.5 * omega * u.values[q];
  return l2_norm(combo);
}

}  // namespace tw
