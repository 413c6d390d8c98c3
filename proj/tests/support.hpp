#pragma once

// Shared fixtures and closed-form oracles for the test binaries.

#include <cmath>
#include <filesystem>
#include <random>
#include <utility>

#include "torus_wave/random_fields.hpp"
#include "torus_wave/torus_field.hpp"

namespace tw::test {

inline std::filesystem::path data_dir() { return TORUS_WAVE_DATA_DIR; }
inline std::filesystem::path scenario_dir() { return TORUS_WAVE_SCENARIO_DIR; }

inline Field sin_x1(const GridSpec& g) {
  return Field::from_function(g, [](double x, double, double) { return std::sin(x); });
}

inline Field cos_x1(const GridSpec& g) {
  return Field::from_function(g, [](double x, double, double) { return std::cos(x); });
}

/// Band-limited field with |n_k| <= kmax and grid maximum `sup`.
inline Field random_field(const GridSpec& g, std::mt19937_64& rng, int kmax, double sup, bool zero_mean = false,
                          double decay = 1.0) {
  RandomFieldOptions opt;
  opt.max_wavenumber = kmax;
  opt.decay = decay;
  opt.zero_mean = zero_mean;
  opt.target_sup = sup;
  return random_band_limited_field(g, rng, opt);
}

/// Exact (v, v') at time t for v'' + 2 omega v' + n_sq v = 0 with v(0) = v0, v'(0) = v1.
/// Solved from the characteristic roots independently of the solver's propagator.
inline std::pair<double, double> damped_mode(double n_sq, double omega, double v0, double v1, double t) {
  if (n_sq == 0.0) {
    const double decay = std::exp(-2.0 * omega * t);
    return {v0 + v1 / (2.0 * omega) * (1.0 - decay), v1 * decay};
  }
  const double d = n_sq - omega * omega;
  const double env = std::exp(-omega * t);
  if (d > 0.0) {
    const double w = std::sqrt(d);
    const double a = v0, b = (v1 + omega * v0) / w;
    const double c = std::cos(w * t), s = std::sin(w * t);
    return {env * (a * c + b * s), env * (-omega * (a * c + b * s) + w * (-a * s + b * c))};
  }
  if (d < 0.0) {
    const double r = std::sqrt(-d);
    const double a = v0, b = (v1 + omega * v0) / r;
    const double c = std::cosh(r * t), s = std::sinh(r * t);
    return {env * (a * c + b * s), env * (-omega * (a * c + b * s) + r * (a * s + b * c))};
  }
  const double a = v0, b = v1 + omega * v0;
  return {env * (a + b * t), env * (b - omega * (a + b * t))};
}

/// c_n = N^-3 sum_j u_j exp(-i n.x_j), evaluated term by term.
inline Spectrum naive_dft(const Field& u) {
  const GridSpec& g = u.grid;
  const int n = g.n();
  Spectrum out(g);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const int k1 = g.wavenumber(p), k2 = g.wavenumber(q), k3 = g.wavenumber(r);
        Complex acc{};
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              const double phase = -(k1 * g.coordinate(i) + k2 * g.coordinate(j) + k3 * g.coordinate(k));
              acc += u(i, j, k) * Complex(std::cos(phase), std::sin(phase));
            }
        out.coeffs[g.flat(p, q, r)] = acc / static_cast<double>(g.size());
      }
  return out;
}

inline double rel_err(double got, double want, double floor = 1e-300) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace tw::test
