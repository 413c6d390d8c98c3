#pragma once

// Gronwall bounds, composition constants and the bootstrap thresholds.

#include <span>
#include <utility>
#include <vector>

namespace tw {

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;
};

/// Bound for g >= 0 with (1/2) d(g^2)/dt <= A g^2 + f g on the shared grid of `a` and `f`:
///   g(t) <= exp(int_t0^t A) g0 + int_t0^t exp(int_s^t A) f(s) ds,
/// with all integrals by the trapezoid rule. The result starts at the sample equal to t0.
TimeSeries gronwall_bound(const TimeSeries& a, const TimeSeries& f, double g0, double t0);

/// Constant C with |(1+u)^mu|_{H^m} <= C |u|_{H^m} + (2 pi)^{3/2} whenever |u|_inf <= delta_prime.
/// `moser` holds the per-order constants C_1..C_m.
double fractional_constant(int m, double mu, double delta_prime, std::span<const double> moser);

/// c_l: bound for |d^l/dx^l (1+x)^mu| on |x| <= delta_prime.
double derivative_bound(double mu, int l, double delta_prime);

/// h(t1) = (1 - exp(-omega t1)) (1 - omega)
double h_threshold(double omega, double t1);

/// g(t) = (1 - omega) - eps' / (1 - exp(-omega t))
double g_function(double t, double omega, double eps_prime);
/// g(t) = [exp(omega t)(1 - eps' - omega) - (1 - omega)] / (exp(omega t) - 1)
double g_function_quotient(double t, double omega, double eps_prime);

struct BootstrapParams {
  double e_m0 = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double t1 = 0.0;
  double eps_prime = 0.0;
  double eps1 = 0.0;  // budget eps1_max
  double eps2 = 0.0;  // budget eps2_max
  double c_delta = 0.0;

  double budget() const noexcept { return eps1 < eps2 ? eps1 : eps2; }
};

/// (eps1_max, eps2_max). Throws ParameterError when eps' >= h(T1) or inputs are out of range.
std::pair<double, double> epsilon_budgets(const BootstrapParams& params, double omega);

/// C(delta) = C_alg (C_frac sqrt(2) E_m(0) + (2 pi)^{3/2}).
double source_constant(double algebra, double fractional, double e_m0);

}  // namespace tw
