#include "torus_wave/random_fields.hpp"

#include <cmath>

#include "torus_wave/error.hpp"

namespace tw {

Field random_band_limited_field(const GridSpec& grid, std::mt19937_64& rng,
                                const RandomFieldOptions& options) {
  const int kmax = options.max_wavenumber;
  if (kmax < 1 || kmax >= grid.n() / 2) {
    throw ParameterError("random field: max wavenumber must lie in [1, n/2)");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(grid);
  // Draw each mode once and mirror it so the field is real.
  for (int n1 = -kmax; n1 <= kmax; ++n1)
    for (int n2 = -kmax; n2 <= kmax; ++n2)
      for (int n3 = -kmax; n3 <= kmax; ++n3) {
        const double re = normal(rng);
        const double im = normal(rng);
        const bool first_of_pair = n1 > 0 || (n1 == 0 && (n2 > 0 || (n2 == 0 && n3 >= 0)));
        if (!first_of_pair) continue;
        const double nsq = static_cast<double>(n1 * n1 + n2 * n2 + n3 * n3);
        const double env = std::pow(1.0 + nsq, -options.decay);
        if (n1 == 0 && n2 == 0 && n3 == 0) {
          s.at(0, 0, 0) = options.zero_mean ? Complex{} : Complex(env * re, 0.0);
          continue;
        }
        const Complex c(env * re, env * im);
        s.at(n1, n2, n3) = c;
        s.at(-n1, -n2, -n3) = std::conj(c);
      }
  Field f = inverse_transform(s);
  if (options.target_sup > 0.0) {
    const double sup = sup_norm(f);
    if (sup > 0.0) f *= options.target_sup / sup;
  }
  return f;
}

}  // namespace tw
