#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "support.hpp"
#include "torus_wave/constants.hpp"
#include "torus_wave/error.hpp"
#include "torus_wave/torus_field.hpp"

using namespace tw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_abs(const Spectrum& s) {
  double m = 0.0;
  for (const auto& c : s.coeffs) m = std::max(m, std::abs(c));
  return m;
}

// Fourth-order central difference along the first axis.
Field fd_d1(const Field& u) {
  const GridSpec& g = u.grid;
  const int n = g.n();
  const double h = g.spacing();
  Field out(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        auto at = [&](int di) { return u((i + di + n) % n, j, k); };
        out(i, j, k) = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
      }
  return out;
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t q = 0; q < a.values.size(); ++q) m = std::max(m, std::abs(a.values[q] - b.values[q]));
  return m;
}

}  // namespace

TEST_CASE("grid rejects odd or tiny sizes", "[torus_field]") {
  CHECK_THROWS_AS(GridSpec(7), ParameterError);
  CHECK_THROWS_AS(GridSpec(2), ParameterError);
  CHECK_NOTHROW(GridSpec(4));
}

TEST_CASE("transform of a constant has only the zero mode", "[torus_field]") {
  const GridSpec g(8);
  const Spectrum s = transform(Field::constant(g, 2.5));
  CHECK_THAT(s.at(0, 0, 0).real(), WithinAbs(2.5, 1e-14));
  double rest = 0.0;
  for (std::size_t q = 1; q < s.coeffs.size(); ++q) rest = std::max(rest, std::abs(s.coeffs[q]));
  CHECK(rest < 1e-14);
}

TEST_CASE("transform of cos(x1) splits evenly between +-1", "[torus_field]") {
  const GridSpec g(8);
  const Spectrum s = transform(test::cos_x1(g));
  CHECK_THAT(s.at(1, 0, 0).real(), WithinAbs(0.5, 1e-14));
  CHECK_THAT(s.at(-1, 0, 0).real(), WithinAbs(0.5, 1e-14));
  double rest = 0.0;
  for (int a = -3; a <= 4; ++a)
    for (int b = -3; b <= 4; ++b)
      for (int c = -3; c <= 4; ++c) {
        if ((a == 1 || a == -1) && b == 0 && c == 0) continue;
        rest = std::max(rest, std::abs(s.at(a, b, c)));
      }
  CHECK(rest < 1e-14);
}

TEST_CASE("transform matches the direct DFT sum on a random 8^3 field", "[torus_field][oracle]") {
  const GridSpec g(8);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  Field u(g);
  for (double& v : u.values) v = normal(rng);
  const Spectrum fast = transform(u);
  const Spectrum slow = test::naive_dft(u);
  double err = 0.0;
  for (std::size_t q = 0; q < fast.coeffs.size(); ++q) err = std::max(err, std::abs(fast.coeffs[q] - slow.coeffs[q]));
  CHECK(err / max_abs(slow) < 1e-10);
}

TEST_CASE("transform rejects non-finite samples and names the index", "[torus_field]") {
  const GridSpec g(8);
  Field u(g);
  u(1, 2, 3) = std::numeric_limits<double>::quiet_NaN();
  try {
    (void)transform(u);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("(1, 2, 3)"));
  }
}

TEST_CASE("round trip and Parseval over random fields", "[torus_field][property]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int n : {4, 8, 16}) {
    const GridSpec g(n);
    for (int rep = 0; rep < 10; ++rep) {
      Field u(g);
      for (double& v : u.values) v = normal(rng) * std::pow(10.0, rep % 5 - 2);
      const Spectrum s = transform(u);
      const Field back = inverse_transform(s);
      CHECK(max_diff(back, u) / sup_norm(u) < 1e-12);

      double grid_sum = 0.0, spec_sum = 0.0;
      for (double v : u.values) grid_sum += v * v;
      grid_sum *= std::pow(g.spacing(), 3);
      for (const auto& c : s.coeffs) spec_sum += std::norm(c);
      spec_sum *= kTorusVolume;
      CHECK_THAT(spec_sum, WithinRel(grid_sum, 1e-10));
      CHECK_THAT(l2_norm(u), WithinRel(std::sqrt(grid_sum), 1e-10));
    }
  }
}

TEST_CASE("spectral derivatives of trigonometric modes", "[torus_field]") {
  const GridSpec g(16);
  const Field d = inverse_transform(spectral_derivative(transform(test::sin_x1(g)), {1, 0, 0}));
  CHECK(max_diff(d, test::cos_x1(g)) < 1e-13);

  // Laplacian of exp(i n.x) is -|n|^2 exp(i n.x); check on the real part cos(n.x).
  const int n1 = 2, n2 = -1, n3 = 3;
  const Field wave = Field::from_function(g, [&](double x, double y, double z) { return std::cos(n1 * x + n2 * y + n3 * z); });
  const Spectrum w = transform(wave);
  Field lap(g);
  for (const MultiIndex& a : {MultiIndex{2, 0, 0}, MultiIndex{0, 2, 0}, MultiIndex{0, 0, 2}})
    lap += inverse_transform(spectral_derivative(w, a));
  Field expect = wave;
  expect *= -double(n1 * n1 + n2 * n2 + n3 * n3);
  CHECK(max_diff(lap, expect) < 1e-12);
}

TEST_CASE("spectral derivative agrees with fourth-order differences", "[torus_field][oracle]") {
  std::mt19937_64 rng(3);
  const Field coarse = test::random_field(GridSpec(16), rng, 3, 1.0);
  double prev = 0.0;
  for (int n : {32, 64}) {
    const Field u = resample(coarse, GridSpec(n));
    const Field spectral = inverse_transform(spectral_derivative(transform(u), {1, 0, 0}));
    const double err = max_diff(fd_d1(u), spectral);
    // Leading error term h^4/30 |u^(5)|, with |u^(5)| <= 3^5 |u^(1)|-scale bounded by the band limit.
    const double h = GridSpec(n).spacing();
    CHECK(err < std::pow(h, 4) / 30.0 * std::pow(3.0, 5) * sup_norm(spectral) * 4.0);
    if (prev > 0.0) CHECK((prev / err > 12.0 && prev / err < 20.0));
    prev = err;
  }
}

TEST_CASE("Sobolev norm examples", "[torus_field]") {
  const GridSpec g(16);
  const double vol_sqrt = std::pow(kTwoPi, 1.5);
  for (int m : {0, 1, 3}) CHECK_THAT(sobolev_norm(Field::constant(g, -1.7), m), WithinRel(1.7 * vol_sqrt, 1e-13));
  CHECK_THAT(sobolev_norm(test::sin_x1(g), 1), WithinRel(vol_sqrt, 1e-13));
  CHECK(sobolev_norm(Field(g), 3) == 0.0);
}

TEST_CASE("Sobolev weights enumerate multi-indices exactly", "[torus_field]") {
  // W_m(n) = sum_{|alpha| <= m} prod n_k^{2 alpha_k}; for n = (1, 2, 0), m = 2:
  // 1 + (1 + 4) + (1 + 16 + 4) = 27.
  const GridSpec g(8);
  const auto w = sobolev_weights(g, 2);
  CHECK(w[g.flat(g.index_of(1), g.index_of(2), 0)] == 27.0);
  CHECK(multi_indices(3).size() == 20u);
  CHECK(multi_indices(3, true).size() == 10u);
}

TEST_CASE("Sobolev norm is monotone in the order", "[torus_field][property]") {
  std::mt19937_64 rng(8);
  const GridSpec g(16);
  for (int rep = 0; rep < 20; ++rep) {
    const Field u = test::random_field(g, rng, 1 + rep % 5, 0.1 + rep);
    double prev = 0.0;
    for (int m = 0; m <= 4; ++m) {
      const double v = sobolev_norm(u, m);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("sup norm examples", "[torus_field]") {
  CHECK(sup_norm(Field::constant(GridSpec(8), -3.0)) == 3.0);
  CHECK_THAT(sup_norm(test::sin_x1(GridSpec(16))), WithinAbs(1.0, 1e-15));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  Field u(GridSpec(8));
  for (double& v : u.values) v = normal(rng);
  double scan = 0.0;
  for (double v : u.values) scan = std::max(scan, std::abs(v));
  CHECK(sup_norm(u) == scan);
}

TEST_CASE("mean decomposition", "[torus_field]") {
  const GridSpec g(16);
  const MeanSplit c = mean_decompose(Field::constant(g, 4.0));
  CHECK_THAT(c.mean, WithinAbs(4.0, 1e-15));
  CHECK(sup_norm(c.oscillatory) < 1e-15);

  const MeanSplit s = mean_decompose(test::sin_x1(g));
  CHECK(std::abs(s.mean) < 1e-15);
  CHECK(max_diff(s.oscillatory, test::sin_x1(g)) < 1e-15);

  const Field shifted = Field::from_function(g, [](double, double y, double) { return 3.0 + std::sin(y); });
  const MeanSplit t = mean_decompose(shifted);
  CHECK_THAT(t.mean, WithinAbs(3.0, 1e-14));
  CHECK_THAT(grid_mean(shifted), WithinAbs(3.0, 1e-14));
  // Pythagoras: |u|^2 = |u - mean|^2 + (2 pi)^3 mean^2.
  const double lhs = std::pow(l2_norm(shifted), 2);
  const double rhs = std::pow(l2_norm(t.oscillatory), 2) + kTorusVolume * t.mean * t.mean;
  CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
}

TEST_CASE("Wirtinger inequality", "[torus_field][property]") {
  const GridSpec g(16);
  const Field s = test::sin_x1(g);
  CHECK(std::abs(l2_norm(s) - gradient_norm(s)) < 1e-12 * l2_norm(s));
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const Field v = test::random_field(g, rng, 1 + rep % 5, 0.5, true);
    CHECK(l2_norm(v) <= gradient_norm(v) * (1.0 + 1e-12));
  }
}

TEST_CASE("dealiasing keeps only the inner two thirds", "[torus_field]") {
  const GridSpec g(12);
  Spectrum s(g);
  for (auto& c : s.coeffs) c = 1.0;
  dealias(s);
  CHECK(is_band_limited(s, g.dealias_cutoff()));
  CHECK(std::abs(s.at(4, 4, -4)) == 1.0);
  CHECK(std::abs(s.at(5, 0, 0)) == 0.0);
}

TEST_CASE("resampling a band-limited field is exact", "[torus_field]") {
  std::mt19937_64 rng(4);
  const Field u = test::random_field(GridSpec(8), rng, 3, 1.0);
  const Field fine = resample(u, GridSpec(16));
  CHECK(max_diff(resample(fine, GridSpec(8)), u) < 1e-13);
  CHECK_THAT(sobolev_norm(fine, 3), WithinRel(sobolev_norm(u, 3), 1e-12));
}

TEST_CASE("Sobolev embedding and algebra hold with the calibrated constants", "[torus_field][property]") {
  const GridSpec g(16);
  const CalibratedConstants c = load_constants(test::data_dir() / "constants_n16.txt");
  std::mt19937_64 rng(777);  // independent of the calibration seed
  for (int rep = 0; rep < 100; ++rep) {
    const int kmax = 1 + rep % 5;
    const Field u = test::random_field(g, rng, kmax, 0.5, rep % 2 == 0, 0.5 + (rep % 3) * 0.5);
    const Field v = test::random_field(g, rng, kmax, 0.5, rep % 3 == 0);
    CHECK(sup_norm(u) <= c.sobolev * sobolev_norm(u, 3));
    CHECK(sobolev_norm(padded_product(u, v), 3) <= c.algebra * sobolev_norm(u, 3) * sobolev_norm(v, 3));
  }
}
