#pragma once

// Periodic scalar fields on the flat 3-torus [0, 2*pi)^3 and their spectral calculus.
//
// Fourier convention: c_n = (2*pi)^-3 * integral of u(x) exp(-i n.x) dx, approximated by the
// grid average. Norms are unnormalized integrals, so Parseval reads
//   integral |u|^2 = (2*pi)^3 * sum |c_n|^2.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace tw {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Volume of the torus, (2*pi)^3.
inline constexpr double kTorusVolume = kTwoPi * kTwoPi * kTwoPi;

/// Uniform grid with n points per axis; the domain length is 2*pi on every axis.
class GridSpec {
 public:
  explicit GridSpec(int n_per_axis);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_ * n_; }
  double spacing() const noexcept { return kTwoPi / n_; }
  double coordinate(int j) const noexcept { return spacing() * j; }

  /// Signed wave number of storage index `index` (FFT ordering, Nyquist maps to -n/2).
  int wavenumber(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }
  /// Storage index of a signed wave number in [-n/2, n/2).
  int index_of(int wavenumber) const noexcept { return wavenumber >= 0 ? wavenumber : wavenumber + n_; }
  bool is_nyquist(int index) const noexcept { return index == n_ / 2; }
  /// Largest retained |n_k| under the 2/3 rule.
  int dealias_cutoff() const noexcept { return n_ / 3; }

  std::size_t flat(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }

  bool operator==(const GridSpec&) const = default;

 private:
  int n_;
};

/// Real samples at x = 2*pi*(i, j, k)/n, row-major with the third axis fastest.
struct Field {
  GridSpec grid;
  std::vector<double> values;

  explicit Field(GridSpec g) : grid(g), values(g.size(), 0.0) {}
  Field(GridSpec g, std::vector<double> v);

  static Field constant(GridSpec g, double c);
  static Field from_function(GridSpec g, const std::function<double(double, double, double)>& f);

  double& operator()(int i, int j, int k) noexcept { return values[grid.flat(i, j, k)]; }
  double operator()(int i, int j, int k) const noexcept { return values[grid.flat(i, j, k)]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Complex Fourier coefficients in FFT storage order (same layout as Field).
struct Spectrum {
  GridSpec grid;
  std::vector<Complex> coeffs;

  explicit Spectrum(GridSpec g) : grid(g), coeffs(g.size(), Complex{}) {}

  /// Coefficient for the wave vector (n1, n2, n3), each in [-n/2, n/2).
  Complex& at(int n1, int n2, int n3) noexcept {
    return coeffs[grid.flat(grid.index_of(n1), grid.index_of(n2), grid.index_of(n3))];
  }
  Complex at(int n1, int n2, int n3) const noexcept {
    return coeffs[grid.flat(grid.index_of(n1), grid.index_of(n2), grid.index_of(n3))];
  }
};

using MultiIndex = std::array<int, 3>;

struct MeanSplit {
  double mean;
  Field oscillatory;
};

/// All multi-indices with |alpha| <= m (or == m when `exact` is set), in a fixed order.
std::vector<MultiIndex> multi_indices(int m, bool exact = false);

Spectrum transform(const Field& field);
Field inverse_transform(const Spectrum& spectrum);

/// Multiplies c_n by prod (i n_k)^{a_k}. Odd derivative orders zero the corresponding Nyquist plane.
Spectrum spectral_derivative(const Spectrum& spectrum, const MultiIndex& alpha);

/// W_m(n) = sum_{|alpha| <= m} prod n_k^{2 a_k}, per storage index.
std::vector<double> sobolev_weights(const GridSpec& grid, int m);

double sobolev_norm(const Field& field, int m);
double sobolev_norm(const Spectrum& spectrum, int m);
double l2_norm(const Field& field);
/// || grad u ||_{L^2}
double gradient_norm(const Field& field);
double sup_norm(const Field& field);
double grid_mean(const Field& field);
MeanSplit mean_decompose(const Field& field);

/// Zeroes every coefficient with some |n_k| above the 2/3 cutoff.
void dealias(Spectrum& spectrum);
bool is_band_limited(const Spectrum& spectrum, int max_wavenumber, double tol = 0.0);

/// Zero-pads or truncates onto `target`; modes at or beyond either Nyquist limit are dropped.
Spectrum resample(const Spectrum& spectrum, const GridSpec& target);
Field resample(const Field& field, const GridSpec& target);

/// Spectrum of u*v computed on a grid of twice the resolution, alias free for band-limited inputs.
Spectrum padded_product(const Field& u, const Field& v);

}  // namespace tw
