#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"
#include "torus_wave/constants.hpp"
#include "torus_wave/error.hpp"
#include "torus_wave/estimates.hpp"
#include "torus_wave/source.hpp"

using namespace tw;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FluidPotential uniform_potential(const GridSpec& g, double phi_t) {
  return FluidPotential{Field::constant(g, phi_t), {Field(g), Field(g), Field(g)}};
}

FluidPotential wavy_potential(const GridSpec& g, double beta) {
  const auto gx = Field::from_function(g, [=](double x, double y, double) { return beta * std::cos(x) * std::sin(y); });
  const auto gy = Field::from_function(g, [=](double x, double y, double) { return beta * std::sin(x) * std::cos(y); });
  return FluidPotential{Field::constant(g, 1.0), {gx, gy, Field(g)}};
}

double field_max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t q = 0; q < a.values.size(); ++q) m = std::max(m, std::abs(a.values[q] - b.values[q]));
  return m;
}

}  // namespace

TEST_CASE("exponents from the equation of state", "[source]") {
  const Exponents half = derive_exponents(0.5, 0.5);
  CHECK_THAT(half.kappa, WithinRel(0.5, 1e-15));
  CHECK_THAT(half.mu, WithinAbs(0.0, 1e-15));

  const Exponents two_thirds = derive_exponents(2.0 / 3.0, 1.0);
  CHECK_THAT(two_thirds.kappa, WithinRel(0.5, 1e-14));
  CHECK_THAT(two_thirds.mu, WithinRel(0.5, 1e-14));

  const Exponents near_one = derive_exponents(1.0 - 1e-9, 0.5);
  CHECK(near_one.kappa > 0.0);
  CHECK(near_one.kappa < 1e-8);
  CHECK_THAT(near_one.mu, WithinAbs(1.0, 1e-8));

  for (double bad : {0.0, 1.0, 1.5, -0.2}) {
    try {
      (void)derive_exponents(bad, 0.5);
      FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
      CHECK_THAT(std::string(e.what()), ContainsSubstring("0 < K < 1"));
    }
  }
}

TEST_CASE("model parameter validation", "[source]") {
  ModelParams p;
  CHECK_NOTHROW(p.validate(true));
  p.k_eos = 2.0 / 3.0;
  CHECK_NOTHROW(p.validate(true));
  p.kappa = 0.5;  // inconsistent with K = 2/3 at omega = 1/2
  CHECK_THROWS_AS(p.validate(), ParameterError);
  ModelParams q;
  q.omega = 1.2;
  CHECK_NOTHROW(q.validate());
  CHECK_THROWS_AS(q.validate(true), ParameterError);
  q.omega = -1.0;
  CHECK_THROWS_AS(q.validate(), ParameterError);
}

TEST_CASE("fluid source examples", "[source]") {
  const GridSpec g(8);
  const Field a = fluid_source(uniform_potential(g, 1.0), 0.5);
  CHECK_THAT(sup_norm(a - Field::constant(g, 1.0 / 6.0)), WithinAbs(0.0, 1e-15));

  const Field zero = fluid_source(wavy_potential(g, 0.5), 1.0 / 3.0);
  CHECK(sup_norm(zero) < 1e-15);

  const Field b = fluid_source(uniform_potential(g, 2.0), 0.5);
  CHECK_THAT(b(3, 1, 4), WithinRel(8.0 / 6.0, 1e-14));
}

TEST_CASE("fluid source rejects non-timelike potentials", "[source]") {
  const GridSpec g(8);
  FluidPotential p = uniform_potential(g, 1.0);
  p.phi_grad[1](2, 5, 0) = 1.5;
  try {
    (void)fluid_source(p, 0.5);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK_THAT(std::string(e.what()), ContainsSubstring("(2, 5, 0)"));
  }
}

TEST_CASE("fluid source is homogeneous in the potential scale", "[source][property]") {
  const GridSpec g(16);
  const FluidPotential p = wavy_potential(g, 0.6);
  for (double k : {0.4, 2.0 / 3.0, 0.9}) {
    const Field base = fluid_source(p, k);
    for (double lambda : {0.1, 0.5, 3.0}) {
      Field expect = base;
      expect *= std::pow(lambda, (1.0 + k) / k);
      CHECK(field_max_diff(fluid_source(p.scaled(lambda), k), expect) <= 1e-13 * sup_norm(expect));
    }
  }
}

TEST_CASE("source evaluation examples", "[source]") {
  const GridSpec g(8);
  ModelParams p;
  p.kappa = 0.25;
  const Field one = Field::constant(g, 1.0);
  for (double mu : {-0.7, 0.5, 2.0}) {
    p.mu = mu;
    CHECK(field_max_diff(eval_source(0.0, Field(g), p, one), one) < 1e-15);
  }
  p.mu = 0.5;
  CHECK_THAT(eval_source(4.0, Field(g), p, one)(1, 1, 1), WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THAT(eval_source(0.0, Field::constant(g, 0.1), p, one)(0, 3, 2), WithinRel(std::sqrt(1.1), 1e-15));
}

TEST_CASE("source evaluation signals breakdown", "[source]") {
  const GridSpec g(8);
  ModelParams p;
  p.mu = 0.5;
  Field u(g);
  u(4, 4, 4) = -1.2;
  try {
    (void)eval_source(1.5, u, p, Field::constant(g, 1.0));
    FAIL("expected BreakdownError");
  } catch (const BreakdownError& e) {
    CHECK(e.time() == 1.5);
    CHECK_THAT(e.u_min(), WithinAbs(-1.2, 1e-15));
  }
  p.mu = 2.0;  // integer powers are defined everywhere
  CHECK_NOTHROW(eval_source(1.5, u, p, Field::constant(g, 1.0)));
}

TEST_CASE("exponent zero ignores u and exponent one is affine", "[source][property]") {
  const GridSpec g(8);
  std::mt19937_64 rng(17);
  ModelParams p;
  const Field a = test::random_field(g, rng, 2, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const Field u = test::random_field(g, rng, 3, 0.6);
    const Field v = test::random_field(g, rng, 3, 0.6);
    p.mu = 0.0;
    CHECK(field_max_diff(eval_source(0.3, u, p, a), eval_source(0.3, v, p, a)) < 1e-15);
    p.mu = 1.0;
    const Field f0 = eval_source(0.3, Field(g), p, a);
    const Field fu = eval_source(0.3, u, p, a), fv = eval_source(0.3, v, p, a);
    const Field fuv = eval_source(0.3, 0.5 * (u + v), p, a);
    CHECK(field_max_diff(fuv, 0.5 * (fu + fv)) < 1e-14);
    CHECK(sup_norm(fu - f0) > 0.0);
  }
}

TEST_CASE("source specs report their amplitude", "[source]") {
  const GridSpec g(16);
  std::mt19937_64 rng(23);
  const Field shape = test::random_field(g, rng, 3, 1.0);

  const SourceSpec steady = SourceSpec::preset(shape, 0.02, 3);
  CHECK_THAT(steady.amplitude(), WithinRel(0.02, 1e-15));
  CHECK_THAT(steady.hm_norm_at(7.0), WithinRel(0.02, 1e-12));

  const SourceSpec cosine = SourceSpec::preset(shape, 0.02, 3, TimeProfile::cosine, 2.0);
  CHECK_THAT(cosine.hm_norm_at(0.0), WithinRel(0.02, 1e-12));
  CHECK(cosine.hm_norm_at(0.5) < 0.02);

  const SourceSpec decaying = SourceSpec::preset(shape, 0.02, 3, TimeProfile::exponential, 1.0);
  CHECK_THAT(decaying.hm_norm_at(1.0), WithinRel(0.02 * std::exp(-1.0), 1e-12));

  const SourceSpec fluid = SourceSpec::fluid(wavy_potential(g, 0.5), 2.0 / 3.0, 0.003, 3);
  CHECK_THAT(fluid.amplitude(), WithinRel(0.003, 1e-12));
  CHECK_THAT(fluid.hm_norm_at(0.0), WithinRel(0.003, 1e-12));
  CHECK(fluid.potential_scale() > 0.0);

  const SourceSpec z = SourceSpec::zero(g);
  CHECK(z.is_zero());
  CHECK(sup_norm(z.at(3.0)) == 0.0);
}

TEST_CASE("sampled sources interpolate linearly and hold outside", "[source]") {
  const GridSpec g(8);
  const Field f0 = Field::constant(g, 1.0), f1 = Field::constant(g, 3.0);
  const SourceSpec s = SourceSpec::samples({0.0, 2.0}, {f0, f1}, 2);
  CHECK_THAT(s.at(0.5)(0, 0, 0), WithinRel(1.5, 1e-15));
  CHECK_THAT(s.at(-1.0)(0, 0, 0), WithinRel(1.0, 1e-15));
  CHECK_THAT(s.at(9.0)(0, 0, 0), WithinRel(3.0, 1e-15));
  CHECK_THAT(s.amplitude(), WithinRel(3.0 * std::pow(kTwoPi, 1.5), 1e-13));
}

TEST_CASE("source norm obeys the composition bound for small u", "[source][property]") {
  const GridSpec g(16);
  const CalibratedConstants c = load_constants(test::data_dir() / "constants_n16.txt");
  std::mt19937_64 rng(99);
  ModelParams p;
  p.kappa = 0.25;
  p.mu = 0.5;
  const double delta_prime = 0.3;
  const SourceSpec spec = SourceSpec::preset(test::random_field(g, rng, 3, 1.0), 1.0, 3);
  for (int rep = 0; rep < 30; ++rep) {
    const Field u = test::random_field(g, rng, 1 + rep % 4, delta_prime * (0.2 + 0.8 * (rep % 5) / 4.0));
    const double t = 0.5 * rep;
    const double frac = fractional_constant(3, p.mu, delta_prime, c.moser);
    const double bound = c.algebra * (frac * sobolev_norm(u, 3) + std::pow(kTwoPi, 1.5));
    const double lhs = sobolev_norm(eval_source(t, u, p, spec), 3);
    CHECK(lhs <= bound * std::exp(-p.kappa * t) * spec.hm_norm_at(t));
  }
}
