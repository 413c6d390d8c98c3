#include "torus_wave/torus_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "torus_wave/error.hpp"

namespace tw {

GridSpec::GridSpec(int n_per_axis) : n_(n_per_axis) {
  if (n_per_axis < 4 || n_per_axis % 2 != 0) {
    throw ParameterError("grid: points per axis must be even and >= 4, got " +
                         std::to_string(n_per_axis));
  }
}

Field::Field(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw ParameterError("field: sample count does not match the grid");
  }
}

Field Field::constant(GridSpec g, double c) {
  Field f(g);
  std::fill(f.values.begin(), f.values.end(), c);
  return f;
}

Field Field::from_function(GridSpec g, const std::function<double(double, double, double)>& f) {
  Field out(g);
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out(i, j, k) = f(g.coordinate(i), g.coordinate(j), g.coordinate(k));
  return out;
}

Field& Field::operator+=(const Field& other) {
  if (!(grid == other.grid)) throw ParameterError("field: grid mismatch");
  for (std::size_t q = 0; q < values.size(); ++q) values[q] += other.values[q];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(grid == other.grid)) throw ParameterError("field: grid mismatch");
  for (std::size_t q = 0; q < values.size(); ++q) values[q] -= other.values[q];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

std::vector<MultiIndex> multi_indices(int m, bool exact) {
  std::vector<MultiIndex> out;
  for (int total = exact ? m : 0; total <= m; ++total)
    for (int a1 = total; a1 >= 0; --a1)
      for (int a2 = total - a1; a2 >= 0; --a2) out.push_back({a1, a2, total - a1 - a2});
  return out;
}

Spectrum transform(const Field& field) {
  Spectrum s(field.grid);
  for (std::size_t q = 0; q < field.values.size(); ++q) {
    const double v = field.values[q];
    if (!std::isfinite(v)) {
      const int n = field.grid.n();
      std::ostringstream msg;
      msg << "transform: non-finite sample " << v << " at index (" << q / (n * n) << ", "
          << (q / n) % n << ", " << q % n << ")";
      throw DomainError(msg.str());
    }
    s.coeffs[q] = Complex(v, 0.0);
  }
  detail::fft3d(s.coeffs, field.grid.n(), true);
  const double scale = 1.0 / static_cast<double>(field.grid.size());
  for (auto& c : s.coeffs) c *= scale;
  return s;
}

Field inverse_transform(const Spectrum& spectrum) {
  std::vector<Complex> work = spectrum.coeffs;
  detail::fft3d(work, spectrum.grid.n(), false);
  Field out(spectrum.grid);
  for (std::size_t q = 0; q < work.size(); ++q) out.values[q] = work[q].real();
  return out;
}

namespace {

Complex i_power(int n, int a) {
  // (i n)^a
  const double mag = std::pow(static_cast<double>(n), a);
  switch (a % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

}  // namespace

Spectrum spectral_derivative(const Spectrum& spectrum, const MultiIndex& alpha) {
  for (int a : alpha) {
    if (a < 0) throw ParameterError("spectral_derivative: multi-index components must be >= 0");
  }
  const GridSpec& g = spectrum.grid;
  const int n = g.n();
  std::array<std::vector<Complex>, 3> factor;
  for (int axis = 0; axis < 3; ++axis) {
    factor[axis].resize(n);
    for (int idx = 0; idx < n; ++idx) {
      const bool drop = g.is_nyquist(idx) && alpha[axis] % 2 == 1;
      factor[axis][idx] = drop ? Complex{} : i_power(g.wavenumber(idx), alpha[axis]);
    }
  }
  Spectrum out(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex fij = factor[0][i] * factor[1][j];
      for (int k = 0; k < n; ++k) {
        const std::size_t q = g.flat(i, j, k);
        out.coeffs[q] = spectrum.coeffs[q] * fij * factor[2][k];
      }
    }
  return out;
}

std::vector<double> sobolev_weights(const GridSpec& grid, int m) {
  if (m < 0) throw ParameterError("sobolev order must be >= 0");
  const int n = grid.n();
  const auto alphas = multi_indices(m);
  std::vector<double> w(grid.size(), 0.0);
  std::vector<double> sq(n);
  for (int idx = 0; idx < n; ++idx) sq[idx] = static_cast<double>(grid.wavenumber(idx)) * grid.wavenumber(idx);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double sum = 0.0;
        for (const auto& a : alphas) {
          sum += std::pow(sq[i], a[0]) * std::pow(sq[j], a[1]) * std::pow(sq[k], a[2]);
        }
        w[grid.flat(i, j, k)] = sum;
      }
  return w;
}

double sobolev_norm(const Spectrum& spectrum, int m) {
  const auto w = sobolev_weights(spectrum.grid, m);
  double sum = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) sum += w[q] * std::norm(spectrum.coeffs[q]);
  return std::sqrt(kTorusVolume * sum);
}

double sobolev_norm(const Field& field, int m) { return sobolev_norm(transform(field), m); }

double l2_norm(const Field& field) {
  double sum = 0.0;
  for (double v : field.values) sum += v * v;
  return std::sqrt(sum * kTorusVolume / static_cast<double>(field.grid.size()));
}

double gradient_norm(const Field& field) {
  const Spectrum s = transform(field);
  const GridSpec& g = s.grid;
  const int n = g.n();
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // Odd derivatives drop the Nyquist plane on their own axis.
        const double n1 = g.is_nyquist(i) ? 0.0 : g.wavenumber(i);
        const double n2 = g.is_nyquist(j) ? 0.0 : g.wavenumber(j);
        const double n3 = g.is_nyquist(k) ? 0.0 : g.wavenumber(k);
        sum += (n1 * n1 + n2 * n2 + n3 * n3) * std::norm(s.coeffs[g.flat(i, j, k)]);
      }
  return std::sqrt(kTorusVolume * sum);
}

double sup_norm(const Field& field) {
  double best = 0.0;
  for (double v : field.values) best = std::max(best, std::abs(v));
  return best;
}

double grid_mean(const Field& field) {
  double sum = 0.0;
  for (double v : field.values) sum += v;
  return sum / static_cast<double>(field.grid.size());
}

MeanSplit mean_decompose(const Field& field) {
  const double mean = grid_mean(field);
  Field osc = field;
  for (double& v : osc.values) v -= mean;
  return {mean, std::move(osc)};
}

void dealias(Spectrum& spectrum) {
  const GridSpec& g = spectrum.grid;
  const int n = g.n();
  const int cut = g.dealias_cutoff();
  for (int i = 0; i < n; ++i) {
    const bool drop_i = std::abs(g.wavenumber(i)) > cut;
    for (int j = 0; j < n; ++j) {
      const bool drop_ij = drop_i || std::abs(g.wavenumber(j)) > cut;
      for (int k = 0; k < n; ++k) {
        if (drop_ij || std::abs(g.wavenumber(k)) > cut) spectrum.coeffs[g.flat(i, j, k)] = Complex{};
      }
    }
  }
}

bool is_band_limited(const Spectrum& spectrum, int max_wavenumber, double tol) {
  const GridSpec& g = spectrum.grid;
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int top = std::max({std::abs(g.wavenumber(i)), std::abs(g.wavenumber(j)),
                                  std::abs(g.wavenumber(k))});
        if (top > max_wavenumber && std::abs(spectrum.coeffs[g.flat(i, j, k)]) > tol) return false;
      }
  return true;
}

Spectrum resample(const Spectrum& spectrum, const GridSpec& target) {
  const GridSpec& src = spectrum.grid;
  Spectrum out(target);
  const int ns = src.n();
  // Only modes strictly inside both Nyquist limits have an unambiguous image.
  const int limit = std::min(ns, target.n()) / 2;
  for (int i = 0; i < ns; ++i) {
    const int n1 = src.wavenumber(i);
    if (std::abs(n1) >= limit) continue;
    for (int j = 0; j < ns; ++j) {
      const int n2 = src.wavenumber(j);
      if (std::abs(n2) >= limit) continue;
      for (int k = 0; k < ns; ++k) {
        const int n3 = src.wavenumber(k);
        if (std::abs(n3) >= limit) continue;
        out.at(n1, n2, n3) = spectrum.coeffs[src.flat(i, j, k)];
      }
    }
  }
  return out;
}

Field resample(const Field& field, const GridSpec& target) {
  if (field.grid == target) return field;
  return inverse_transform(resample(transform(field), target));
}

Spectrum padded_product(const Field& u, const Field& v) {
  if (!(u.grid == v.grid)) throw ParameterError("padded_product: grid mismatch");
  const GridSpec fine(2 * u.grid.n());
  Field uf = resample(u, fine);
  const Field vf = resample(v, fine);
  for (std::size_t q = 0; q < uf.values.size(); ++q) uf.values[q] *= vf.values[q];
  return transform(uf);
}

}  // namespace tw
